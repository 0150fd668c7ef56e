/*
 Copyright 2026 The fog-skills Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/


#include "fog/eval/plot.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "fog/core/errors.hpp"

namespace fog::eval {

namespace {

using Rgb = std::array<std::uint8_t, 3>;

constexpr int kWidth = 480;
constexpr int kHeight = 320;
constexpr int kMargin = 32;
constexpr Rgb kBlack{0, 0, 0};
constexpr Rgb kGrey{170, 170, 170};

class Canvas {
 public:
  Canvas(int w, int h) {
    buf_.width = w;
    buf_.height = h;
    buf_.pixels.assign(static_cast<std::size_t>(w) * h * 3, 255);
  }

  void set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= buf_.width || y >= buf_.height) return;
    const std::size_t i = (static_cast<std::size_t>(y) * buf_.width + x) * 3;
    buf_.pixels[i] = c[0];
    buf_.pixels[i + 1] = c[1];
    buf_.pixels[i + 2] = c[2];
  }

  void line(int x0, int y0, int x1, int y1, Rgb c) {
    const int dx = std::abs(x1 - x0), sx = x0 < x1 ? 1 : -1;
    const int dy = -std::abs(y1 - y0), sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
      set(x0, y0, c);
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }

  void rect(int x0, int y0, int x1, int y1, Rgb c) {
    for (int y = std::min(y0, y1); y <= std::max(y0, y1); ++y) {
      for (int x = std::min(x0, x1); x <= std::max(x0, x1); ++x) set(x, y, c);
    }
  }

  core::RgbBuffer take() { return std::move(buf_); }

 private:
  core::RgbBuffer buf_;
};

/// Linear map of a data range onto the plot area.
struct Axes {
  double x0, x1, y0, y1;
  int px(double x) const {
    const double t = x1 > x0 ? (x - x0) / (x1 - x0) : 0.5;
    return kMargin + static_cast<int>(std::lround(t * (kWidth - 2 * kMargin)));
  }
  int py(double y) const {
    const double t = y1 > y0 ? (y - y0) / (y1 - y0) : 0.5;
    return kHeight - kMargin - static_cast<int>(std::lround(t * (kHeight - 2 * kMargin)));
  }
};

Axes padded(double x0, double x1, double y0, double y1) {
  const double px = std::max(1e-9, 0.05 * (x1 - x0));
  const double py = std::max(1e-9, 0.05 * (y1 - y0));
  return {x0 - px, x1 + px, y0 - py, y1 + py};
}

void draw_frame(Canvas& c, const Axes& a) {
  c.line(kMargin, kHeight - kMargin, kWidth - kMargin, kHeight - kMargin, kBlack);
  c.line(kMargin, kMargin, kMargin, kHeight - kMargin, kBlack);
  if (a.y0 < 0.0 && a.y1 > 0.0) c.line(kMargin, a.py(0.0), kWidth - kMargin, a.py(0.0), kGrey);
}

Rgb hue(double h) {
  h = h - std::floor(h);
  const double r = std::clamp(std::abs(h * 6.0 - 3.0) - 1.0, 0.0, 1.0);
  const double g = std::clamp(2.0 - std::abs(h * 6.0 - 2.0), 0.0, 1.0);
  const double b = std::clamp(2.0 - std::abs(h * 6.0 - 4.0), 0.0, 1.0);
  return {static_cast<std::uint8_t>(std::lround(200 * r)), static_cast<std::uint8_t>(std::lround(200 * g)),
          static_cast<std::uint8_t>(std::lround(200 * b))};
}

double cell_number(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw InvalidArgument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw InvalidArgument("CSV cell '" + s + "' is not a number");
  }
}

std::vector<double> column(const CsvTable& t, std::size_t j) {
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) out.push_back(cell_number(r[j]));
  return out;
}

void min_max(const std::vector<double>& v, double& lo, double& hi) {
  lo = v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
  hi = v.empty() ? 1.0 : *std::max_element(v.begin(), v.end());
}

/// Rows grouped by an integer key column, each group ordered as in the file.
std::map<long long, std::vector<std::size_t>> group_rows(const CsvTable& t, std::size_t key) {
  std::map<long long, std::vector<std::size_t>> g;
  for (std::size_t i = 0; i < t.rows.size(); ++i) g[std::llround(cell_number(t.rows[i][key]))].push_back(i);
  return g;
}

core::RgbBuffer render_bar(const CsvTable& t) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> values;
  for (const auto& r : t.rows) {
    if (!values.count(r[0])) order.push_back(r[0]);
    values[r[0]].push_back(cell_number(r[2]));
  }
  double lo = 0.0, hi = 0.0;
  for (const auto& [g, v] : values) {
    const Aggregate a = aggregate(v);
    lo = std::min({lo, a.mean - a.stderr_, *std::min_element(v.begin(), v.end())});
    hi = std::max({hi, a.mean + a.stderr_, *std::max_element(v.begin(), v.end())});
  }
  const double n = static_cast<double>(std::max<std::size_t>(order.size(), 1));
  const Axes ax = padded(0.0, n, lo, hi);
  Canvas c(kWidth, kHeight);
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& v = values[order[k]];
    const Aggregate a = aggregate(v);
    const double centre = static_cast<double>(k) + 0.5;
    const Rgb col = hue(static_cast<double>(k) / n);
    c.rect(ax.px(centre - 0.3), ax.py(0.0), ax.px(centre + 0.3), ax.py(a.mean), col);
    const int wx = ax.px(centre);
    c.line(wx, ax.py(a.mean - a.stderr_), wx, ax.py(a.mean + a.stderr_), kBlack);
    c.line(wx - 6, ax.py(a.mean - a.stderr_), wx + 6, ax.py(a.mean - a.stderr_), kBlack);
    c.line(wx - 6, ax.py(a.mean + a.stderr_), wx + 6, ax.py(a.mean + a.stderr_), kBlack);
    for (std::size_t i = 0; i < v.size(); ++i) {
      const int dx = ax.px(centre - 0.2 + 0.4 * (static_cast<double>(i) + 0.5) / static_cast<double>(v.size()));
      c.rect(dx - 1, ax.py(v[i]) - 1, dx + 1, ax.py(v[i]) + 1, kBlack);
    }
  }
  draw_frame(c, ax);
  return c.take();
}

/// Polylines of (xcol, ycol) grouped by `key`, coloured by group.
core::RgbBuffer render_lines(const CsvTable& t, std::size_t key, std::size_t xcol, std::size_t ycol,
                             bool unit_y) {
  const auto xs = column(t, xcol);
  const auto ys = column(t, ycol);
  double x0, x1, y0, y1;
  min_max(xs, x0, x1);
  min_max(ys, y0, y1);
  if (unit_y) {
    y0 = std::min(y0, 0.0);
    y1 = std::max(y1, 1.0);
  }
  const Axes ax = padded(x0, x1, y0, y1);
  Canvas c(kWidth, kHeight);
  draw_frame(c, ax);
  const auto groups = group_rows(t, key);
  const double n = static_cast<double>(std::max<std::size_t>(groups.size(), 1));
  std::size_t k = 0;
  for (const auto& [id, rows] : groups) {
    const Rgb col = hue(static_cast<double>(k++) / n);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const int px = ax.px(xs[rows[i]]), py = ax.py(ys[rows[i]]);
      if (i == 0) {
        c.set(px, py, col);
      } else {
        c.line(ax.px(xs[rows[i - 1]]), ax.py(ys[rows[i - 1]]), px, py, col);
      }
    }
  }
  return c.take();
}

core::RgbBuffer render_curve(const CsvTable& t) {
  const auto xs = column(t, 0);
  const auto ys = column(t, 1);
  double x0, x1, y0, y1;
  min_max(xs, x0, x1);
  min_max(ys, y0, y1);
  const Axes ax = padded(x0, x1, std::min(y0, 0.0), y1);
  Canvas c(kWidth, kHeight);
  draw_frame(c, ax);
  constexpr std::size_t kWindow = 10;
  double prev_x = 0.0, prev_m = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    c.set(ax.px(xs[i]), ax.py(ys[i]), kGrey);
    const std::size_t lo = i + 1 > kWindow ? i + 1 - kWindow : 0;
    double m = 0.0;
    for (std::size_t j = lo; j <= i; ++j) m += ys[j];
    m /= static_cast<double>(i + 1 - lo);
    if (i > 0) c.line(ax.px(prev_x), ax.py(prev_m), ax.px(xs[i]), ax.py(m), Rgb{30, 90, 200});
    prev_x = xs[i];
    prev_m = m;
  }
  return c.take();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::string format_number(double v) {
  if (std::isfinite(v) && v == std::trunc(v) && std::abs(v) < 1e15) {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  auto put_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out += ',';
      out += row[j];
    }
    out += '\n';
  };
  put_row(table.header);
  for (const auto& r : table.rows) put_row(r);
  return out;
}

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.find('"') != std::string::npos) throw InvalidArgument("quoted CSV cells are not supported");
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t p = line.find(',', start);
      cells.push_back(line.substr(start, p == std::string::npos ? std::string::npos : p - start));
      if (p == std::string::npos) break;
      start = p + 1;
    }
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != t.header.size()) {
        throw InvalidArgument("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                              std::to_string(t.header.size()));
      }
      t.rows.push_back(std::move(cells));
    }
  }
  if (first) throw InvalidArgument("CSV input is empty");
  return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

PlotKind plot_kind(const CsvTable& table) {
  using H = std::vector<std::string>;
  if (table.header == H{"group", "seed", "value"}) return PlotKind::kBar;
  if (table.header == H{"skill", "step", "x", "y"}) return PlotKind::kFan;
  if (table.header == H{"episode", "step", "score"}) return PlotKind::kScoreLine;
  if (table.header == H{"episode", "return"}) return PlotKind::kLearningCurve;
  std::string h;
  for (const auto& c : table.header) h += (h.empty() ? "" : ",") + c;
  throw InvalidArgument("unrecognised CSV header '" + h + "'");
}

CsvTable bar_table(const std::vector<BarEntry>& entries) {
  CsvTable t{{"group", "seed", "value"}, {}};
  for (const auto& e : entries) {
    if (e.group.find_first_of(",\n\"") != std::string::npos) throw InvalidArgument("bar group contains a separator");
    t.rows.push_back({e.group, std::to_string(e.seed), format_number(e.value)});
  }
  return t;
}

CsvTable fan_table(const EvalReport& report) {
  CsvTable t{{"skill", "step", "x", "y"}, {}};
  for (std::size_t k = 0; k < report.trajectories.size(); ++k) {
    const auto& traj = report.trajectories[k];
    for (std::size_t s = 0; s < traj.states.size(); ++s) {
      const Eigen::Vector2d p = envs::position_of(report.env, traj.states[s].vec());
      t.rows.push_back({std::to_string(k), std::to_string(s), format_number(p.x()), format_number(p.y())});
    }
  }
  return t;
}

CsvTable score_table(const AuditResult& audit) {
  CsvTable t{{"episode", "step", "score"}, {}};
  for (std::size_t e = 0; e < audit.scores.size(); ++e) {
    const std::string id = std::to_string(e < audit.episode_ids.size() ? audit.episode_ids[e] : static_cast<int>(e));
    for (std::size_t s = 0; s < audit.scores[e].size(); ++s) {
      t.rows.push_back({id, std::to_string(s), format_number(audit.scores[e][s])});
    }
  }
  return t;
}

CsvTable curve_table(const std::vector<double>& returns) {
  CsvTable t{{"episode", "return"}, {}};
  for (std::size_t i = 0; i < returns.size(); ++i) t.rows.push_back({std::to_string(i), format_number(returns[i])});
  return t;
}

core::RgbBuffer render_plot(const CsvTable& table) {
  switch (plot_kind(table)) {
    case PlotKind::kBar: return render_bar(table);
    case PlotKind::kFan: return render_lines(table, 0, 2, 3, false);
    case PlotKind::kScoreLine: return render_lines(table, 0, 1, 2, true);
    case PlotKind::kLearningCurve: return render_curve(table);
  }
  return {};
}

std::filesystem::path write_plot(const CsvTable& table, const std::filesystem::path& dir, const std::string& stem) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const auto image = render_plot(table);
  const auto csv = dir / (stem + ".csv");
  write_text(csv, to_csv(table));
  core::write_png(dir / (stem + ".png"), image);
  return csv;
}

std::vector<std::filesystem::path> emit_plots(const std::vector<EvalReport>& reports,
                                              const std::filesystem::path& out_dir) {
  if (reports.empty()) throw InvalidArgument("emit_plots needs at least one report");
  std::vector<BarEntry> cov, safe, flips;
  for (const auto& r : reports) {
    cov.push_back({r.method, r.seed, static_cast<double>(r.coverage)});
    safe.push_back({r.method, r.seed, static_cast<double>(r.safe_coverage)});
    flips.push_back({r.method, r.seed, r.flip_pct});
  }
  std::vector<std::filesystem::path> out;
  out.push_back(write_plot(bar_table(cov), out_dir, "coverage"));
  out.push_back(write_plot(bar_table(safe), out_dir, "safe_coverage"));
  if (reports.front().env == "tipcart") out.push_back(write_plot(bar_table(flips), out_dir, "flip_pct"));
  for (const auto& r : reports) {
    out.push_back(write_plot(fan_table(r), out_dir, "fan_" + r.method + "_" + std::to_string(r.seed)));
  }
  return out;
}

std::vector<std::filesystem::path> replot(const std::vector<std::filesystem::path>& csvs,
                                          const std::filesystem::path& out_dir) {
  std::vector<std::filesystem::path> out;
  for (const auto& p : csvs) out.push_back(write_plot(read_csv(p), out_dir, p.stem().string()));
  return out;
}

}  // namespace fog::eval
