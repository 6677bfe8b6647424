#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "qsn/experiments.hpp"
#include "qsn/output.hpp"

namespace qsn {

namespace {

bool same_lambda(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)); }

std::string grid_diff(const CollapseCurve& a, const CollapseCurve& b) {
  auto missing = [](const CollapseCurve& from, const CollapseCurve& in) {
    std::string out;
    for (double l : from.lambdas) {
      const bool found = std::any_of(in.lambdas.begin(), in.lambdas.end(),
                                     [&](double x) { return same_lambda(x, l); });
      if (!found) out += " " + format_double(l);
    }
    return out;
  };
  std::string msg = "lambda grids differ for model " + a.model + ": ";
  msg += "only in " + a.variant + ":" + missing(a, b) + ";";
  msg += " only in " + b.variant + ":" + missing(b, a);
  return msg;
}

}  // namespace

std::vector<CollapsePanel> collapse_report(const std::vector<ResultRow>& rows) {
  // model -> variant -> rows
  std::map<std::string, std::map<std::string, std::vector<const ResultRow*>>> groups;
  std::vector<std::string> model_order;
  std::map<std::string, std::vector<std::string>> variant_order;
  for (const auto& r : rows) {
    if (r.method != "exact" || r.measure != "k") continue;
    const std::string model = r.model + "_n" + std::to_string(r.n);
    if (!groups.count(model)) model_order.push_back(model);
    auto& variants = groups[model];
    const std::string variant = r.variant();
    if (!variants.count(variant)) variant_order[model].push_back(variant);
    variants[variant].push_back(&r);
  }

  std::vector<CollapsePanel> panels;
  for (const auto& model : model_order) {
    CollapsePanel panel;
    panel.model = model;
    for (const auto& variant : variant_order[model]) {
      auto curve_rows = groups[model][variant];
      std::stable_sort(curve_rows.begin(), curve_rows.end(),
                       [](const ResultRow* a, const ResultRow* b) { return a->lambda < b->lambda; });
      const auto base = std::find_if(curve_rows.begin(), curve_rows.end(),
                                     [](const ResultRow* r) { return r->h == 0.0; });
      if (base == curve_rows.end())
        throw ReportError("missing h=0 baseline for model " + model + " variant " + variant);
      const double norm = (*base)->mean;
      if (!(norm > 0.0))
        throw ReportError("h=0 baseline of model " + model + " variant " + variant +
                          " is not positive");
      CollapseCurve curve;
      curve.model = model;
      curve.variant = variant;
      for (const ResultRow* r : curve_rows) {
        curve.lambdas.push_back(r->lambda);
        curve.normalized.push_back(r->mean / norm);
      }
      panel.curves.push_back(std::move(curve));
    }
    const CollapseCurve& ref = panel.curves.front();
    for (const auto& c : panel.curves) {
      bool match = c.lambdas.size() == ref.lambdas.size();
      for (std::size_t i = 0; match && i < c.lambdas.size(); ++i)
        match = same_lambda(c.lambdas[i], ref.lambdas[i]);
      if (!match) throw ReportError(grid_diff(ref, c));
    }
    for (std::size_t a = 0; a < panel.curves.size(); ++a)
      for (std::size_t b = a + 1; b < panel.curves.size(); ++b)
        for (std::size_t i = 0; i < ref.lambdas.size(); ++i)
          panel.max_deviation =
              std::max(panel.max_deviation,
                       std::abs(panel.curves[a].normalized[i] - panel.curves[b].normalized[i]));
    panels.push_back(std::move(panel));
  }
  if (panels.empty()) throw ReportError("no exact degree rows to normalize");
  return panels;
}

void write_collapse(const std::vector<CollapsePanel>& panels, const std::filesystem::path& dir) {
  std::string summary = std::string(kSchemaLine) + "\nmodel,curves,max_deviation\n";
  for (const auto& p : panels) {
    std::ostringstream csv;
    csv << kSchemaLine << "\nlambda";
    for (const auto& c : p.curves) csv << ',' << c.variant;
    csv << '\n';
    for (std::size_t i = 0; i < p.curves.front().lambdas.size(); ++i) {
      csv << format_double(p.curves.front().lambdas[i]);
      for (const auto& c : p.curves) csv << ',' << format_double(c.normalized[i]);
      csv << '\n';
    }
    write_text_file(dir / ("collapse_" + p.model + ".csv"), csv.str());
    summary += p.model + "," + std::to_string(p.curves.size()) + "," +
               format_double(p.max_deviation) + "\n";
  }
  write_text_file(dir / "collapse_summary.csv", summary);
}

}  // namespace qsn
