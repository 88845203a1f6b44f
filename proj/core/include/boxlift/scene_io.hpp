#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boxlift/feature.hpp"
#include "boxlift/scene.hpp"

namespace boxlift {

// Scene container layout (docs/formats.md has the byte-level description):
//   <dir>/manifest.json            structured metadata, versioned
//   <dir>/points/<frame>.bin       float32 LE, xyz interleaved
//   <dir>/features/<frame>.bin     float32 LE, n_features x dim
// Binary payloads carry all bulk floating point data so a save/load round
// trip is bit-exact. Throws kIo on filesystem trouble, kParse on malformed
// payloads, kVersion on an unknown manifest version, kSchema when the data
// model's invariants fail.
void save_scene(const Scene& scene, const std::string& dir);
Scene load_scene(const std::string& dir);

TextCatalog load_catalog(const std::string& path);
void save_catalog(const std::string& path, const TextCatalog& catalog);

// Row-major mask bitmap <-> run lengths, alternating runs of 0s and 1s
// starting with 0s. Sum of runs equals the bitmap size.
std::vector<std::int64_t> rle_encode(const std::vector<std::uint8_t>& bitmap);
std::vector<std::uint8_t> rle_decode(const std::vector<std::int64_t>& runs, std::size_t size);

}  // namespace boxlift
