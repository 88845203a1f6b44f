#include "boxlift/bev_svg.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "boxlift/errors.hpp"

namespace boxlift {

namespace {

constexpr double kExtent = 54.0;    // metres shown from center to edge
constexpr int kCanvas = 1080;       // square canvas, kCanvas / (2 * kExtent) px per metre
constexpr std::size_t kMaxPoints = 8000;  // strided subsample above this

double px(double x_m) { return kCanvas / 2.0 + x_m * (kCanvas / (2.0 * kExtent)); }
double py(double y_m) { return kCanvas / 2.0 - y_m * (kCanvas / (2.0 * kExtent)); }

void appendf(std::string& out, const char* fmt, double a, double b, double c = 0.0,
             double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
  out += buf;
}

void append_box(std::string& out, const Box3D& box, const char* color, const std::string& tag) {
  appendf(out,
          "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" ",
          px(box.center.x - 0.5 * box.l), py(box.center.y + 0.5 * box.w),
          box.l * (kCanvas / (2.0 * kExtent)), box.w * (kCanvas / (2.0 * kExtent)));
  out += "fill=\"none\" stroke=\"";
  out += color;
  out += "\" stroke-width=\"1.5\"/>\n";
  if (!tag.empty()) {
    appendf(out, "<text x=\"%.1f\" y=\"%.1f\" ", px(box.center.x - 0.5 * box.l),
            py(box.center.y + 0.5 * box.w) - 2.0);
    out += "font-size=\"10\" font-family=\"monospace\" fill=\"";
    out += color;
    out += "\">" + tag + "</text>\n";
  }
}

}  // namespace

std::string render_bev_svg(const Frame& frame, const std::vector<LabeledBox>& boxes,
                           const std::vector<LabeledBox>& gt) {
  std::string out;
  out.reserve(1 << 16);
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\">\n",
                kCanvas, kCanvas, kCanvas, kCanvas);
  out += buf;
  std::snprintf(buf, sizeof(buf), "<rect width=\"%d\" height=\"%d\" fill=\"#101418\"/>\n", kCanvas,
                kCanvas);
  out += buf;

  for (double r : {18.0, 34.0, 54.0}) {
    appendf(out,
            "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"%.1f\" fill=\"none\" "
            "stroke=\"#2a3442\" stroke-width=\"1\"/>\n",
            px(0.0), py(0.0), r * (kCanvas / (2.0 * kExtent)));
  }

  const std::size_t n = frame.points.points.size();
  const std::size_t stride = n > kMaxPoints ? (n + kMaxPoints - 1) / kMaxPoints : 1;
  for (std::size_t i = 0; i < n; i += stride) {
    const Vec3& p = frame.points.points[i];
    if (std::abs(p.x) > kExtent || std::abs(p.y) > kExtent) {
      continue;
    }
    appendf(out, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"1\" fill=\"#4a5868\"/>\n", px(p.x), py(p.y));
  }

  for (const LabeledBox& g : gt) {
    append_box(out, g.box, "#3fae6a", "");
  }
  for (const LabeledBox& b : boxes) {
    append_box(out, b.box, "#e08a3c", b.class_name);
  }

  std::snprintf(buf, sizeof(buf),
                "<text x=\"8\" y=\"16\" font-size=\"12\" font-family=\"monospace\" "
                "fill=\"#aab6c4\">frame %lld | %zu boxes | %zu gt</text>\n",
                static_cast<long long>(frame.frame_id), boxes.size(), gt.size());
  out += buf;
  out += "</svg>\n";
  return out;
}

void export_bev_svg(const Frame& frame, const std::vector<LabeledBox>& boxes,
                    const std::vector<LabeledBox>& gt, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    fail(ErrorCode::kIo, "export_bev_svg: cannot open " + path);
  }
  const std::string svg = render_bev_svg(frame, boxes, gt);
  file.write(svg.data(), static_cast<std::streamsize>(svg.size()));
  if (!file) {
    fail(ErrorCode::kIo, "export_bev_svg: write failed for " + path);
  }
}

}  // namespace boxlift
