#include "crawl/height_map.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "crawl/rng.hpp"

namespace crawl {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
  throw std::runtime_error("heightmap line " + std::to_string(line) + ": " + what);
}

}  // namespace

HeightMap::HeightMap(double resolution, const Vec2& origin, int cols, int rows,
                     std::vector<double> values)
    : resolution_(resolution), origin_(origin), cols_(cols), rows_(rows),
      values_(std::move(values)) {
  if (!(resolution_ > 0.0) || !std::isfinite(resolution_)) {
    throw std::invalid_argument("heightmap resolution must be positive");
  }
  if (cols_ < 2 || rows_ < 2) {
    throw std::invalid_argument("heightmap needs at least a 2x2 grid");
  }
  if (values_.size() != static_cast<size_t>(cols_) * rows_) {
    throw std::invalid_argument("heightmap value count does not match size");
  }
}

HeightMap HeightMap::parse(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next_content_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_content_line()) parse_fail(line_no + 1, "empty input");
  {
    std::istringstream header(line);
    std::string magic, version;
    header >> magic >> version;
    if (magic != "heightmap" || version != "v1") {
      parse_fail(line_no, "expected 'heightmap v1' header");
    }
  }

  double resolution = 0.04;
  Vec2 origin{0.0, 0.0};
  int cols = -1, rows = -1;
  while (true) {
    if (!next_content_line()) parse_fail(line_no + 1, "missing 'size' line");
    std::istringstream fields(line);
    std::string key;
    fields >> key;
    if (key == "resolution") {
      if (!(fields >> resolution)) parse_fail(line_no, "bad resolution value");
    } else if (key == "origin") {
      if (!(fields >> origin.x() >> origin.y())) parse_fail(line_no, "bad origin values");
    } else if (key == "size") {
      if (!(fields >> cols >> rows)) parse_fail(line_no, "bad size values");
      break;
    } else {
      parse_fail(line_no, "unknown header key '" + key + "'");
    }
  }
  if (cols < 2 || rows < 2) parse_fail(line_no, "size must be at least 2x2");

  std::vector<double> values;
  values.reserve(static_cast<size_t>(cols) * rows);
  for (int r = 0; r < rows; ++r) {
    if (!next_content_line()) parse_fail(line_no + 1, "missing data row");
    std::istringstream fields(line);
    for (int c = 0; c < cols; ++c) {
      double v = 0.0;
      if (!(fields >> v)) parse_fail(line_no, "bad or missing height value");
      values.push_back(v);
    }
    double extra = 0.0;
    if (fields >> extra) parse_fail(line_no, "too many values in row");
  }
  if (next_content_line()) parse_fail(line_no, "unexpected trailing content");
  return HeightMap(resolution, origin, cols, rows, std::move(values));
}

HeightMap HeightMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open heightmap file: " + path);
  return parse(in);
}

void HeightMap::save(std::ostream& out) const {
  out << "heightmap v1\n";
  char buf[64];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf << sep;
  };
  out << "resolution ";
  put(resolution_, '\n');
  out << "origin ";
  put(origin_.x(), ' ');
  put(origin_.y(), '\n');
  out << "size " << cols_ << ' ' << rows_ << '\n';
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      put(node(c, r), c + 1 == cols_ ? '\n' : ' ');
    }
  }
}

Vec2 HeightMap::max_corner() const {
  return origin_ + resolution_ * Vec2(cols_ - 1, rows_ - 1);
}

bool HeightMap::contains(const Vec2& xy) const {
  const Vec2 rel = xy - origin_;
  const Vec2 max = max_corner() - origin_;
  return rel.x() >= 0.0 && rel.y() >= 0.0 && rel.x() <= max.x() && rel.y() <= max.y();
}

double HeightMap::height_at(const Vec2& xy) const {
  if (!contains(xy)) {
    throw std::out_of_range("height query outside the map");
  }
  const double fx = (xy.x() - origin_.x()) / resolution_;
  const double fy = (xy.y() - origin_.y()) / resolution_;
  int c0 = std::min(static_cast<int>(fx), cols_ - 2);
  int r0 = std::min(static_cast<int>(fy), rows_ - 2);
  const double ax = fx - c0;
  const double ay = fy - r0;
  const double z00 = node(c0, r0), z10 = node(c0 + 1, r0);
  const double z01 = node(c0, r0 + 1), z11 = node(c0 + 1, r0 + 1);
  return (1.0 - ax) * (1.0 - ay) * z00 + ax * (1.0 - ay) * z10 +
         (1.0 - ax) * ay * z01 + ax * ay * z11;
}

HeightMap HeightMap::flat(double resolution, const Vec2& origin, int cols, int rows,
                          double height) {
  return HeightMap(resolution, origin, cols, rows,
                   std::vector<double>(static_cast<size_t>(cols) * rows, height));
}

HeightMap HeightMap::ramp(double resolution, const Vec2& origin, int cols, int rows,
                          double angle, double start_x) {
  std::vector<double> v(static_cast<size_t>(cols) * rows, 0.0);
  const double slope = std::tan(angle);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double x = origin.x() + c * resolution;
      if (x > start_x) v[r * cols + c] = slope * (x - start_x);
    }
  }
  return HeightMap(resolution, origin, cols, rows, std::move(v));
}

HeightMap HeightMap::stairs(double resolution, const Vec2& origin, int cols, int rows,
                            double rise, double tread, int count, double start_x,
                            int turn) {
  if (count < 1 || rise <= 0.0 || tread <= 0.0) {
    throw std::invalid_argument("stairs need positive rise/tread and count >= 1");
  }
  std::vector<double> v(static_cast<size_t>(cols) * rows, 0.0);
  const int straight = turn == 0 ? count : (count + 1) / 2;
  const double turn_x = start_x + straight * tread;  // start of the landing
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double x = origin.x() + c * resolution;
      const double y = origin.y() + r * resolution;
      double z = 0.0;
      if (x >= start_x) {
        const int step = std::min(static_cast<int>((x - start_x) / tread) + 1, straight);
        z = step * rise;
        if (turn != 0 && x >= turn_x) {
          // square landing one tread deep, then climb along +/-y
          const double dy = turn > 0 ? y - tread * 0.5 : -y - tread * 0.5;
          if (dy > 0.0) {
            const int step2 =
                std::min(static_cast<int>(dy / tread) + 1, count - straight);
            z = (straight + std::max(step2, 0)) * rise;
          }
        }
      }
      v[r * cols + c] = z;
    }
  }
  return HeightMap(resolution, origin, cols, rows, std::move(v));
}

HeightMap HeightMap::rocks(double resolution, const Vec2& origin, int cols, int rows,
                           double max_height, double start_x, uint64_t seed) {
  if (max_height <= 0.0) {
    throw std::invalid_argument("rock field needs a positive max height");
  }
  std::vector<double> v(static_cast<size_t>(cols) * rows, 0.0);
  const Vec2 max = origin + resolution * Vec2(cols - 1, rows - 1);
  const double x_lo = std::max(start_x, origin.x()) + 0.05;
  const double field_area = std::max(0.0, (max.x() - x_lo) * (max.y() - origin.y()));
  const int bumps = static_cast<int>(std::ceil(field_area * 6.0));
  Rng rng(seed ^ 0x9e3779b97f4a7c15ull);
  for (int b = 0; b < bumps; ++b) {
    const double cx = rng.uniform(x_lo, max.x() - 0.05);
    const double cy = rng.uniform(origin.y() + 0.05, max.y() - 0.05);
    const double radius = rng.uniform(0.06, 0.18);
    const double height = rng.uniform(0.25, 1.0) * max_height;
    const int c_lo = std::max(0, static_cast<int>((cx - radius - origin.x()) / resolution));
    const int c_hi = std::min(cols - 1,
                              static_cast<int>((cx + radius - origin.x()) / resolution) + 1);
    const int r_lo = std::max(0, static_cast<int>((cy - radius - origin.y()) / resolution));
    const int r_hi = std::min(rows - 1,
                              static_cast<int>((cy + radius - origin.y()) / resolution) + 1);
    for (int r = r_lo; r <= r_hi; ++r) {
      for (int c = c_lo; c <= c_hi; ++c) {
        const double x = origin.x() + c * resolution;
        const double y = origin.y() + r * resolution;
        const double dist = std::hypot(x - cx, y - cy);
        if (dist >= radius || x < start_x) continue;
        const double profile = std::cos(0.5 * M_PI * dist / radius);
        double& cell = v[r * cols + c];
        cell = std::min(std::max(cell, height * profile * profile), max_height);
      }
    }
  }
  return HeightMap(resolution, origin, cols, rows, std::move(v));
}

}  // namespace crawl
