#include "lamarck/analysis.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "lamarck/experiment.hpp"
#include "lamarck/stats.hpp"

namespace lamarck {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) { return ordered_json(v).dump(); }
std::string csv_num(double v) { return std::isnan(v) ? std::string() : num(v); }

void spill(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

// Linear-interpolation quantile (the common "type 7" definition) over a
// sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return kNaN;
  const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

struct BoxSummary {
  std::size_t count = 0;
  double min = kNaN, q1 = kNaN, median = kNaN, q3 = kNaN, max = kNaN, mean = kNaN;
};

BoxSummary box_summary(std::vector<double> values) {
  BoxSummary b;
  b.count = values.size();
  if (values.empty()) return b;
  std::sort(values.begin(), values.end());
  b.min = values.front();
  b.q1 = quantile_sorted(values, 0.25);
  b.median = quantile_sorted(values, 0.5);
  b.q3 = quantile_sorted(values, 0.75);
  b.max = values.back();
  double s = 0;
  for (double v : values) s += v;
  b.mean = s / static_cast<double>(values.size());
  return b;
}

std::vector<double> initial_fitness_of(const std::vector<IndividualPoint>& pts) {
  std::vector<double> v;
  v.reserve(pts.size());
  for (const IndividualPoint& p : pts) v.push_back(p.initial_fitness);
  return v;
}

const std::array<const char*, 4> kPalette = {"#1b6ca8", "#d1495b", "#2e933c", "#e1a100"};

struct Series {
  std::string name;
  std::string color;
  std::vector<double> y;  // index = generation; NaN rows skipped
};

std::string line_chart_svg(const std::string& title, const std::string& y_label,
                           const std::vector<Series>& series) {
  const double width = 720, height = 480, left = 64, right = 24, top = 40, bottom = 48;
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  std::size_t nmax = 0;
  for (const Series& s : series) {
    nmax = std::max(nmax, s.y.size());
    for (double v : s.y) {
      if (std::isnan(v)) continue;
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  if (!(ymin < ymax)) {
    ymin = std::isfinite(ymin) ? ymin - 1 : 0;
    ymax = ymin + 2;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  const double gmax = nmax > 1 ? static_cast<double>(nmax - 1) : 1.0;
  const auto sx = [&](double g) { return left + (width - left - right) * (g / gmax); };
  const auto sy = [&](double v) {
    return height - bottom - (height - top - bottom) * ((v - ymin) / (ymax - ymin));
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << title << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << height - bottom << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << height - bottom << "\" x2=\"" << width - right
      << "\" y2=\"" << height - bottom << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double v = ymin + (ymax - ymin) * t / 5.0;
    out << "<line x1=\"" << left - 4 << "\" y1=\"" << sy(v) << "\" x2=\"" << left << "\" y2=\""
        << sy(v) << "\" stroke=\"black\"/>\n";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    out << "<text x=\"" << left - 8 << "\" y=\"" << sy(v) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << buf
        << "</text>\n";
  }
  for (std::size_t g = 0; g < nmax; ++g) {
    out << "<text x=\"" << sx(static_cast<double>(g)) << "\" y=\"" << height - bottom + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << g
        << "</text>\n";
  }
  out << "<text x=\"16\" y=\"" << (top + height - bottom) / 2
      << "\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
      << (top + height - bottom) / 2 << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";
  out << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">generation"
         "</text>\n";
  for (std::size_t si = 0; si < series.size(); ++si) {
    const Series& s = series[si];
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (std::size_t g = 0; g < s.y.size(); ++g) {
      if (std::isnan(s.y[g])) continue;
      if (!first) out << ' ';
      out << sx(static_cast<double>(g)) << ',' << sy(s.y[g]);
      first = false;
    }
    out << "\"/>\n";
    const double ly = top + 16 * static_cast<double>(si);
    out << "<line x1=\"" << width - right - 150 << "\" y1=\"" << ly << "\" x2=\""
        << width - right - 126 << "\" y2=\"" << ly << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << width - right - 120 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.name << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string box_chart_svg(const std::string& title, const std::vector<std::string>& labels,
                          const std::vector<BoxSummary>& boxes) {
  const double width = 720, height = 480, left = 64, right = 24, top = 40, bottom = 72;
  double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
  for (const BoxSummary& b : boxes) {
    if (b.count == 0) continue;
    ymin = std::min(ymin, b.min);
    ymax = std::max(ymax, b.max);
  }
  if (!(ymin < ymax)) {
    ymin = std::isfinite(ymin) ? ymin - 1 : 0;
    ymax = ymin + 2;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;
  const auto sy = [&](double v) {
    return height - bottom - (height - top - bottom) * ((v - ymin) / (ymax - ymin));
  };
  const double slot = (width - left - right) / static_cast<double>(std::max<std::size_t>(boxes.size(), 1));

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"16\">"
      << title << "</text>\n";
  out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << height - bottom << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 5; ++t) {
    const double v = ymin + (ymax - ymin) * t / 5.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    out << "<line x1=\"" << left - 4 << "\" y1=\"" << sy(v) << "\" x2=\"" << left << "\" y2=\""
        << sy(v) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << sy(v) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << buf
        << "</text>\n";
  }
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const BoxSummary& b = boxes[i];
    const double cx = left + slot * (static_cast<double>(i) + 0.5);
    out << "<text x=\"" << cx << "\" y=\"" << height - bottom + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\" "
           "transform=\"rotate(30 "
        << cx << ' ' << height - bottom + 16 << ")\">" << labels[i] << "</text>\n";
    if (b.count == 0) continue;
    const double bw = slot * 0.4;
    out << "<line x1=\"" << cx << "\" y1=\"" << sy(b.min) << "\" x2=\"" << cx << "\" y2=\""
        << sy(b.max) << "\" stroke=\"black\"/>\n";
    out << "<rect x=\"" << cx - bw / 2 << "\" y=\"" << sy(b.q3) << "\" width=\"" << bw
        << "\" height=\"" << sy(b.q1) - sy(b.q3) << "\" fill=\"#cfe3f2\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << cx - bw / 2 << "\" y1=\"" << sy(b.median) << "\" x2=\"" << cx + bw / 2
        << "\" y2=\"" << sy(b.median) << "\" stroke=\"#1b6ca8\" stroke-width=\"2\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

ordered_json test_json(const TestResult& t) {
  ordered_json j;
  j["statistic"] = t.statistic;
  if (t.df > 0) j["df"] = t.df;
  j["p_value"] = t.p_value;
  return j;
}

// One named two-sample comparison: Welch when both sides have n >= 2,
// Mann–Whitney when both are non-empty, low_n flag under 5 per side.
ordered_json comparison_json(const std::string& name, const std::vector<double>& a,
                             const std::vector<double>& b) {
  ordered_json j;
  j["name"] = name;
  j["n1"] = a.size();
  j["n2"] = b.size();
  j["low_n"] = a.size() < 5 || b.size() < 5;
  if (a.size() >= 2 && b.size() >= 2) {
    j["welch"] = test_json(welch_t_test(a, b));
  } else {
    j["welch"] = nullptr;
  }
  if (!a.empty() && !b.empty()) {
    j["mann_whitney"] = test_json(mann_whitney_u(a, b));
  } else {
    j["mann_whitney"] = nullptr;
  }
  return j;
}

}  // namespace

std::vector<RunData> load_runs(const std::filesystem::path& output_dir) {
  std::vector<RunData> runs;
  for (const CellRef& cell : find_cells(output_dir)) {
    std::ifstream in(cell.dir / "runlog.jsonl");
    if (!in) throw std::runtime_error("cannot open " + (cell.dir / "runlog.jsonl").string());
    runs.push_back({cell.condition, cell.run_index, parse_runlog(in)});
  }
  return runs;
}

ConditionSummary summarize_condition(const Condition& c, const std::vector<RunData>& runs) {
  ConditionSummary s;
  s.condition = c;
  std::vector<const RunData*> mine;
  for (const RunData& r : runs) {
    if (r.condition == c) mine.push_back(&r);
  }
  s.runs = static_cast<int>(mine.size());
  if (mine.empty()) return s;

  const std::size_t len = mine.front()->log.summaries.size();
  if (len == 0) throw std::runtime_error("runlog has no summary lines");
  for (const RunData* r : mine) {
    if (r->log.summaries.size() != len) {
      throw std::runtime_error("inconsistent generation counts across runs of " +
                               condition_name(c));
    }
    for (std::size_t g = 0; g < len; ++g) {
      if (r->log.summaries[g].gen != static_cast<int>(g)) {
        throw std::runtime_error("summary lines out of order in a run of " + condition_name(c));
      }
    }
  }
  s.generations = static_cast<int>(len) - 1;
  s.mean_f.assign(len, 0.0);
  s.max_f.assign(len, 0.0);
  s.mean_dissimilarity.assign(len, kNaN);
  for (std::size_t g = 0; g < len; ++g) {
    double mf = 0, xf = 0, md = 0;
    bool has_d = true;
    for (const RunData* r : mine) {
      const SummaryRecord& rec = r->log.summaries[g];
      mf += rec.mean_f;
      xf += rec.max_f;
      if (rec.mean_parent_dissimilarity) {
        md += *rec.mean_parent_dissimilarity;
      } else {
        has_d = false;
      }
    }
    s.mean_f[g] = mf / static_cast<double>(mine.size());
    s.max_f[g] = xf / static_cast<double>(mine.size());
    if (has_d) s.mean_dissimilarity[g] = md / static_cast<double>(mine.size());
  }
  for (const RunData* r : mine) s.run_final_mean_f.push_back(r->log.summaries[len - 1].mean_f);

  double dsum = 0;
  long dn = 0;
  for (const RunData* r : mine) {
    for (std::size_t g = 1; g < len; ++g) {
      if (r->log.summaries[g].mean_parent_dissimilarity) {
        dsum += *r->log.summaries[g].mean_parent_dissimilarity;
        ++dn;
      }
    }
  }
  s.overall_mean_dissimilarity = dn > 0 ? dsum / static_cast<double>(dn) : kNaN;
  return s;
}

std::vector<IndividualPoint> unique_individuals(const RunLogData& log) {
  std::vector<IndividualPoint> out;
  std::unordered_set<std::uint64_t> seen;
  for (const LogRecord& r : log.records) {
    if (!seen.insert(r.id).second) continue;
    out.push_back({r.id, r.gen, r.f_locomotion, r.initial_fitness, r.parent_dissimilarity});
  }
  return out;
}

std::pair<std::vector<IndividualPoint>, std::vector<IndividualPoint>> similarity_split(
    const std::vector<IndividualPoint>& individuals) {
  std::vector<double> values;
  for (const IndividualPoint& p : individuals) {
    if (p.parent_dissimilarity) values.push_back(*p.parent_dissimilarity);
  }
  std::pair<std::vector<IndividualPoint>, std::vector<IndividualPoint>> split;
  if (values.empty()) return split;
  const double med = median(values);
  for (const IndividualPoint& p : individuals) {
    if (!p.parent_dissimilarity) continue;
    if (*p.parent_dissimilarity <= med) {
      split.first.push_back(p);
    } else {
      split.second.push_back(p);
    }
  }
  return split;
}

std::pair<std::vector<IndividualPoint>, std::vector<IndividualPoint>> capped_comparison(
    const std::vector<IndividualPoint>& pure, const std::vector<IndividualPoint>& combined) {
  if (combined.empty()) {
    throw std::invalid_argument("capped comparison requires a non-empty combined sample");
  }
  double cap = -std::numeric_limits<double>::infinity();
  for (const IndividualPoint& p : combined) cap = std::max(cap, p.f_locomotion);
  std::pair<std::vector<IndividualPoint>, std::vector<IndividualPoint>> out;
  for (const IndividualPoint& p : pure) {
    if (p.f_locomotion <= cap) out.first.push_back(p);
  }
  out.second = combined;
  return out;
}

void build_report(const std::filesystem::path& output_dir, const ReportOptions& opts) {
  const std::vector<RunData> runs = load_runs(output_dir);
  if (runs.empty()) {
    throw std::runtime_error("no runs found under " + output_dir.string());
  }

  std::vector<std::string> warnings;
  std::vector<ConditionSummary> present;
  for (const Condition& c : all_conditions()) {
    ConditionSummary s = summarize_condition(c, runs);
    if (s.runs == 0) {
      warnings.push_back("condition " + condition_name(c) + " has no runs; report is partial");
      continue;
    }
    present.push_back(std::move(s));
  }
  for (std::size_t i = 1; i < present.size(); ++i) {
    if (present[i].generations != present[0].generations) {
      throw std::runtime_error("conditions disagree on generation count; cannot build report");
    }
  }
  const int gens = present.empty() ? 0 : present.front().generations;

  // Pooled per-condition offspring points (unique individuals that carry a
  // parent dissimilarity).
  const auto offspring_points = [&](const Condition& c) {
    std::vector<IndividualPoint> pts;
    for (const RunData& r : runs) {
      if (!(r.condition == c)) continue;
      for (const IndividualPoint& p : unique_individuals(r.log)) {
        if (p.parent_dissimilarity) pts.push_back(p);
      }
    }
    return pts;
  };

  const std::filesystem::path report = output_dir / "report";
  std::filesystem::create_directories(report);

  const auto per_condition_table = [&](auto value_at) {
    std::ostringstream csv;
    csv << "gen";
    for (const ConditionSummary& s : present) csv << ',' << condition_name(s.condition);
    csv << '\n';
    for (int g = 0; g <= gens; ++g) {
      csv << g;
      for (const ConditionSummary& s : present) csv << ',' << csv_num(value_at(s, g));
      csv << '\n';
    }
    return csv.str();
  };
  spill(report / "fitness_mean.csv",
        per_condition_table([](const ConditionSummary& s, int g) { return s.mean_f[g]; }));
  spill(report / "fitness_max.csv",
        per_condition_table([](const ConditionSummary& s, int g) { return s.max_f[g]; }));
  spill(report / "dissimilarity_mean.csv", per_condition_table([](const ConditionSummary& s, int g) {
          return s.mean_dissimilarity[g];
        }));

  const auto find_summary = [&](InheritanceMode im, FitnessMode fm) -> const ConditionSummary* {
    for (const ConditionSummary& s : present) {
      if (s.condition.inheritance == im && s.condition.fitness == fm) return &s;
    }
    return nullptr;
  };
  {
    const ConditionSummary* dp = find_summary(InheritanceMode::Darwinian, FitnessMode::Pure);
    const ConditionSummary* dc = find_summary(InheritanceMode::Darwinian, FitnessMode::Combined);
    const ConditionSummary* lp = find_summary(InheritanceMode::Lamarckian, FitnessMode::Pure);
    const ConditionSummary* lc = find_summary(InheritanceMode::Lamarckian, FitnessMode::Combined);
    const bool dar = dp && dc, lam = lp && lc;
    std::ostringstream csv;
    csv << "gen";
    if (dar) csv << ",darwinian";
    if (lam) csv << ",lamarckian";
    csv << '\n';
    for (int g = 0; g <= gens; ++g) {
      csv << g;
      if (dar) csv << ',' << csv_num(dp->mean_f[g] - dc->mean_f[g]);
      if (lam) csv << ',' << csv_num(lp->mean_f[g] - lc->mean_f[g]);
      csv << '\n';
    }
    spill(report / "fitness_difference.csv", csv.str());
    if (!dar) warnings.push_back("pure-minus-combined curve skipped for darwinian: missing condition");
    if (!lam) warnings.push_back("pure-minus-combined curve skipped for lamarckian: missing condition");
  }

  std::vector<std::string> box_labels;
  std::vector<BoxSummary> box_rows;
  {
    std::ostringstream csv;
    csv << "condition,split,count,min,q1,median,q3,max,mean\n";
    for (const ConditionSummary& s : present) {
      const auto split = similarity_split(offspring_points(s.condition));
      const std::array<std::pair<const char*, const std::vector<IndividualPoint>*>, 2> sides = {
          std::make_pair("more_similar", &split.first),
          std::make_pair("less_similar", &split.second)};
      for (const auto& [label, pts] : sides) {
        const BoxSummary b = box_summary(initial_fitness_of(*pts));
        csv << condition_name(s.condition) << ',' << label << ',' << b.count << ','
            << csv_num(b.min) << ',' << csv_num(b.q1) << ',' << csv_num(b.median) << ','
            << csv_num(b.q3) << ',' << csv_num(b.max) << ',' << csv_num(b.mean) << '\n';
        box_labels.push_back(condition_name(s.condition) + std::string(" ") + label);
        box_rows.push_back(b);
      }
    }
    spill(report / "initial_fitness_split.csv", csv.str());
  }

  ordered_json tests;
  tests["comparisons"] = ordered_json::array();
  const auto add_comparison = [&](const std::string& name, const std::vector<double>& a,
                                  const std::vector<double>& b) {
    tests["comparisons"].push_back(comparison_json(name, a, b));
  };
  const auto final_f = [&](InheritanceMode im, FitnessMode fm) -> const std::vector<double>* {
    const ConditionSummary* s = find_summary(im, fm);
    return s ? &s->run_final_mean_f : nullptr;
  };
  const struct {
    const char* name;
    InheritanceMode im1;
    FitnessMode fm1;
    InheritanceMode im2;
    FitnessMode fm2;
  } final_pairs[] = {
      {"final_mean_f:lam-pure_vs_dar-pure", InheritanceMode::Lamarckian, FitnessMode::Pure,
       InheritanceMode::Darwinian, FitnessMode::Pure},
      {"final_mean_f:lam-comb_vs_dar-comb", InheritanceMode::Lamarckian, FitnessMode::Combined,
       InheritanceMode::Darwinian, FitnessMode::Combined},
      {"final_mean_f:dar-pure_vs_dar-comb", InheritanceMode::Darwinian, FitnessMode::Pure,
       InheritanceMode::Darwinian, FitnessMode::Combined},
      {"final_mean_f:lam-pure_vs_lam-comb", InheritanceMode::Lamarckian, FitnessMode::Pure,
       InheritanceMode::Lamarckian, FitnessMode::Combined},
  };
  for (const auto& p : final_pairs) {
    const std::vector<double>* a = final_f(p.im1, p.fm1);
    const std::vector<double>* b = final_f(p.im2, p.fm2);
    if (a && b) {
      add_comparison(p.name, *a, *b);
    } else {
      warnings.push_back(std::string("comparison ") + p.name + " skipped: missing condition");
    }
  }
  for (const ConditionSummary& s : present) {
    const auto split = similarity_split(offspring_points(s.condition));
    add_comparison("initial_fitness_more_vs_less_similar:" + condition_name(s.condition),
                   initial_fitness_of(split.first), initial_fitness_of(split.second));
  }
  const struct {
    const char* name;
    InheritanceMode im;
  } capped_pairs[] = {
      {"initial_fitness_capped_pure_vs_combined:darwinian", InheritanceMode::Darwinian},
      {"initial_fitness_capped_pure_vs_combined:lamarckian", InheritanceMode::Lamarckian},
  };
  for (const auto& p : capped_pairs) {
    const ConditionSummary* pure = find_summary(p.im, FitnessMode::Pure);
    const ConditionSummary* comb = find_summary(p.im, FitnessMode::Combined);
    if (!pure || !comb) {
      warnings.push_back(std::string("comparison ") + p.name + " skipped: missing condition");
      continue;
    }
    const std::vector<IndividualPoint> pure_pts = offspring_points(pure->condition);
    const std::vector<IndividualPoint> comb_pts = offspring_points(comb->condition);
    if (comb_pts.empty()) {
      warnings.push_back(std::string("comparison ") + p.name + " skipped: no combined offspring");
      continue;
    }
    const auto capped = capped_comparison(pure_pts, comb_pts);
    add_comparison(p.name, initial_fitness_of(capped.first), initial_fitness_of(capped.second));
  }
  tests["warnings"] = warnings;
  spill(report / "tests.json", tests.dump(2) + "\n");

  if (opts.svg) {
    std::vector<Series> mean_series;
    for (std::size_t i = 0; i < present.size(); ++i) {
      mean_series.push_back(
          {condition_name(present[i].condition), kPalette[i % kPalette.size()], present[i].mean_f});
    }
    spill(report / "fitness_mean.svg",
          line_chart_svg("mean locomotion fitness per generation", "mean f_locomotion",
                         mean_series));
    std::vector<Series> dis_series;
    for (std::size_t i = 0; i < present.size(); ++i) {
      dis_series.push_back({condition_name(present[i].condition), kPalette[i % kPalette.size()],
                            present[i].mean_dissimilarity});
    }
    spill(report / "dissimilarity_mean.svg",
          line_chart_svg("mean parent dissimilarity per generation", "mean dissimilarity",
                         dis_series));
    spill(report / "initial_fitness_split.svg",
          box_chart_svg("offspring initial fitness by similarity split", box_labels, box_rows));
  }
}

}  // namespace lamarck
