#include "sdenet/plots.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "sdenet/error.hpp"

namespace sdenet {

namespace fs = std::filesystem;

const char* plot_kind_name(PlotKind kind) {
  switch (kind) {
    case PlotKind::RateVsHorizon: return "rate-vs-T";
    case PlotKind::ComplexityVsP: return "complexity-vs-p";
    case PlotKind::RateVsEta: return "rate-vs-eta";
  }
  return "rate-vs-T";
}

PlotKind parse_plot_kind(const std::string& name) {
  for (PlotKind k : {PlotKind::RateVsHorizon, PlotKind::ComplexityVsP, PlotKind::RateVsEta})
    if (name == plot_kind_name(k)) return k;
  throw Error("bad-input", "unknown plot kind " + name);
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

struct CurvePoint {
  double x;
  double rate, lo, hi;
  int trials;
};

struct Curve {
  std::string label;  // for the legend
  std::string slug;   // for the filename
  std::vector<CurvePoint> points;
};

// group cells into curves keyed by every coordinate except the x axis
std::vector<Curve> group_curves(const ExperimentResult& result, PlotKind kind) {
  const ExperimentConfig& cfg = result.config;
  const bool x_is_horizon = kind == PlotKind::RateVsHorizon;
  std::map<std::string, Curve> by_key;
  for (const CellResult& cr : result.cells) {
    std::ostringstream label, slug;
    auto tag = [&](const std::string& name, const std::string& value, bool always) {
      if (!always) return;
      if (label.tellp() > 0) {
        label << ", ";
        slug << '_';
      }
      label << name << '=' << value;
      slug << name << value;
    };
    tag("p", std::to_string(cr.cell.p), true);
    tag("k", std::to_string(cr.cell.k), cfg.k_grid.size() > 1);
    tag("eta", num(cr.cell.eta), x_is_horizon && cfg.eta_grid.size() > 1);
    tag("T", num(cr.cell.horizon), !x_is_horizon && cfg.horizon_grid.size() > 1);
    tag("ensemble", ensemble_name(cr.cell.ensemble), cfg.ensemble_grid.size() > 1);
    tag("m", num(cr.cell.m), cfg.m_grid.size() > 1);

    Curve& curve = by_key[slug.str()];
    curve.label = label.str();
    curve.slug = slug.str();
    WilsonInterval w = cr.interval();
    curve.points.push_back({x_is_horizon ? cr.cell.horizon : cr.cell.eta, cr.rate(), w.lo, w.hi,
                            cr.trials});
  }
  std::vector<Curve> curves;
  for (auto& [key, curve] : by_key) {
    std::sort(curve.points.begin(), curve.points.end(),
              [](const CurvePoint& a, const CurvePoint& b) { return a.x < b.x; });
    curves.push_back(std::move(curve));
  }
  return curves;
}

constexpr const char* kPalette[] = {"#1b6ca8", "#c2503b", "#3c8a4d",
                                    "#8458a8", "#b0821f", "#50828f"};
constexpr int kPaletteSize = 6;
constexpr double kWidth = 640, kHeight = 480, kMargin = 60;

struct Scale {
  double min, max;
  double map(double v, double lo_px, double hi_px) const {
    double t = max > min ? (v - min) / (max - min) : 0.5;
    return lo_px + t * (hi_px - lo_px);
  }
};

void write_svg(const std::string& path, const std::string& x_label, const std::string& y_label,
               Scale xs, Scale ys, const std::vector<Curve>& curves,
               const std::vector<std::vector<std::pair<double, double>>>& xy_per_curve) {
  std::ofstream out(path);
  if (!out) throw Error("bad-file", "cannot write " + path);
  auto px = [&](double x) { return xs.map(x, kMargin, kWidth - kMargin); };
  auto py = [&](double y) { return ys.map(y, kHeight - kMargin, kMargin); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kHeight - kMargin << "\" x2=\""
      << kWidth - kMargin << "\" y2=\"" << kHeight - kMargin
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin << "\" y2=\""
      << kHeight - kMargin << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 15
      << "\" text-anchor=\"middle\" font-size=\"14\">" << x_label << "</text>\n";
  out << "<text x=\"18\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" font-size=\"14\""
      << " transform=\"rotate(-90 18 " << kHeight / 2 << ")\">" << y_label << "</text>\n";
  for (double t : {0.0, 1.0}) {
    double xv = xs.min + t * (xs.max - xs.min);
    double yv = ys.min + t * (ys.max - ys.min);
    out << "<text x=\"" << px(xv) << "\" y=\"" << kHeight - kMargin + 18
        << "\" text-anchor=\"middle\" font-size=\"12\">" << num(xv) << "</text>\n";
    out << "<text x=\"" << kMargin - 8 << "\" y=\"" << py(yv) + 4
        << "\" text-anchor=\"end\" font-size=\"12\">" << num(yv) << "</text>\n";
  }
  for (std::size_t c = 0; c < xy_per_curve.size(); ++c) {
    const char* color = kPalette[c % kPaletteSize];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < xy_per_curve[c].size(); ++i) {
      if (i) out << ' ';
      out << num(px(xy_per_curve[c][i].first)) << ',' << num(py(xy_per_curve[c][i].second));
    }
    out << "\"/>\n";
    out << "<text x=\"" << kWidth - kMargin + 4 << "\" y=\"" << kMargin + 16 * (c + 1)
        << "\" font-size=\"12\" fill=\"" << color << "\" text-anchor=\"start\">"
        << (c < curves.size() ? curves[c].label : "") << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace

std::vector<std::string> emit_plots(const ExperimentResult& result, PlotKind kind,
                                    const std::string& out_dir) {
  if (result.cells.empty()) throw Error("bad-input", "empty result");
  fs::create_directories(out_dir);
  std::vector<std::string> written;

  if (kind == PlotKind::ComplexityVsP) {
    if (result.complexity.empty())
      throw Error("bad-input", "result carries no sample-complexity curve");
    fs::path csv_path = fs::path(out_dir) / "complexity_vs_p.csv";
    std::ofstream csv(csv_path);
    csv << "x,complexity,reached,threshold\n";
    std::vector<std::vector<std::pair<double, double>>> xy(1);
    for (const ComplexityPoint& cp : result.complexity) {
      csv << cp.p << ',' << (cp.reached ? num(cp.horizon) : "") << ',' << (cp.reached ? 1 : 0)
          << ',' << num(result.config.success_threshold) << '\n';
      if (cp.reached) xy[0].emplace_back(cp.p, cp.horizon);
    }
    written.push_back(csv_path.string());
    if (!xy[0].empty()) {
      double xmin = xy[0].front().first, xmax = xy[0].back().first;
      double ymin = xy[0][0].second, ymax = ymin;
      for (auto& [x, y] : xy[0]) {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
      }
      if (xmin == xmax) { xmin -= 1; xmax += 1; }
      if (ymin == ymax) { ymin -= 1; ymax += 1; }
      Curve label_curve;
      label_curve.label = "complexity";
      fs::path svg_path = fs::path(out_dir) / "complexity_vs_p.svg";
      write_svg(svg_path.string(), "p", "horizon at threshold", {xmin, xmax}, {ymin, ymax},
                {label_curve}, xy);
      written.push_back(svg_path.string());
    }
    return written;
  }

  std::vector<Curve> curves = group_curves(result, kind);
  const bool x_is_horizon = kind == PlotKind::RateVsHorizon;
  const char* stem = x_is_horizon ? "rate_vs_T" : "rate_vs_eta";

  double xmin = curves[0].points[0].x, xmax = xmin;
  std::vector<std::vector<std::pair<double, double>>> xy;
  for (const Curve& curve : curves) {
    fs::path csv_path = fs::path(out_dir) / (std::string(stem) + "_" + curve.slug + ".csv");
    std::ofstream csv(csv_path);
    csv << "x,rate,wilson_lo,wilson_hi,trials\n";
    std::vector<std::pair<double, double>> pts;
    for (const CurvePoint& pt : curve.points) {
      csv << num(pt.x) << ',' << num(pt.rate) << ',' << num(pt.lo) << ',' << num(pt.hi) << ','
          << pt.trials << '\n';
      xmin = std::min(xmin, pt.x);
      xmax = std::max(xmax, pt.x);
      pts.emplace_back(pt.x, pt.rate);
    }
    written.push_back(csv_path.string());
    xy.push_back(std::move(pts));
  }
  if (xmin == xmax) { xmin -= 1; xmax += 1; }
  fs::path svg_path = fs::path(out_dir) / (std::string(stem) + ".svg");
  write_svg(svg_path.string(), x_is_horizon ? "observation interval" : "sampling step",
            "success rate", {xmin, xmax}, {0.0, 1.0}, curves, xy);
  written.push_back(svg_path.string());
  return written;
}

}  // namespace sdenet
