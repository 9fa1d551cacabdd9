#include "amtd/csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "amtd/errors.hpp"

namespace amtd {

namespace {

constexpr const char* kCurveHeader = "trial,episode,step,raw_return,smoothed_return,eval_return,smoothed_eval_return";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double to_double(const std::string& s, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw UsageError("line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

std::size_t to_size(const std::string& s, std::size_t line) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw UsageError("line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return static_cast<std::size_t>(std::strtoull(s.c_str(), nullptr, 10));
}

std::string optional_cell(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  return out;
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> smooth(std::span<const double> values, std::size_t window) {
  if (window < 1) throw UsageError("smoothing window must be at least 1");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t begin = i + 1 >= window ? i + 1 - window : 0;
    double sum = 0.0;
    for (std::size_t k = begin; k <= i; ++k) sum += values[k];
    out[i] = sum / static_cast<double>(i + 1 - begin);
  }
  return out;
}

void write_curve_csv(const std::string& path, std::span<const CurvePoint> points) {
  auto out = open_out(path);
  out << kCurveHeader << "\n";
  for (const auto& p : points) {
    out << p.trial << ',' << p.episode << ',' << p.step << ',' << format_number(p.raw_return) << ','
        << format_number(p.smoothed_return) << ',' << optional_cell(p.eval_return) << ','
        << optional_cell(p.smoothed_eval_return) << "\n";
  }
}

std::vector<CurvePoint> read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::string line;
  if (!std::getline(in, line) || line != kCurveHeader) throw UsageError(path + ": unexpected curve header");
  std::vector<CurvePoint> out;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 7) throw UsageError(path + ": line " + std::to_string(number) + " needs 7 columns");
    CurvePoint p;
    p.trial = to_size(cells[0], number);
    p.episode = to_size(cells[1], number);
    p.step = to_size(cells[2], number);
    p.raw_return = to_double(cells[3], number);
    p.smoothed_return = to_double(cells[4], number);
    if (!cells[5].empty()) p.eval_return = to_double(cells[5], number);
    if (!cells[6].empty()) p.smoothed_eval_return = to_double(cells[6], number);
    out.push_back(p);
  }
  return out;
}

TrialSummary summarize_trial(std::size_t trial, std::uint64_t seed, std::span<const CurvePoint> curve) {
  TrialSummary s;
  s.trial = trial;
  s.seed = seed;
  if (curve.empty()) {
    s.error = "empty learning curve";
    return s;
  }
  s.ok = true;
  s.max_smoothed_return = curve.front().smoothed_return;
  for (const auto& p : curve) {
    s.max_smoothed_return = std::max(s.max_smoothed_return, p.smoothed_return);
    if (p.smoothed_eval_return) {
      s.max_smoothed_eval_return = std::max(s.max_smoothed_eval_return.value_or(*p.smoothed_eval_return),
                                            *p.smoothed_eval_return);
      s.final_smoothed_eval_return = p.smoothed_eval_return;
    }
  }
  s.final_smoothed_return = curve.back().smoothed_return;
  s.episodes = curve.size();
  s.steps = curve.back().step;
  return s;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd r;
  r.count = values.size();
  if (values.empty()) return r;
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return r;
}

SummaryRow summarize(const std::string& agent, const std::string& env, std::span<const TrialSummary> trials) {
  SummaryRow row;
  row.agent = agent;
  row.env = env;
  std::vector<double> maxima;
  std::vector<double> eval_maxima;
  bool all_eval = true;
  for (const auto& t : trials) {
    if (!t.ok) {
      ++row.trials_failed;
      continue;
    }
    ++row.trials_ok;
    maxima.push_back(t.max_smoothed_return);
    if (t.max_smoothed_eval_return) {
      eval_maxima.push_back(*t.max_smoothed_eval_return);
    } else {
      all_eval = false;
    }
  }
  if (row.trials_ok == 0) throw UsageError("no successful trial to summarize");
  row.max_smoothed_return = mean_std(maxima);
  if (all_eval) row.max_smoothed_eval_return = mean_std(eval_maxima);
  return row;
}

void write_trials_csv(const std::string& path, const std::string& agent, const std::string& env,
                      std::span<const TrialSummary> trials) {
  auto out = open_out(path);
  out << "agent,env,trial,seed,status,max_smoothed_return,max_smoothed_eval_return,final_smoothed_return,"
         "final_smoothed_eval_return,episodes,steps,error\n";
  for (const auto& t : trials) {
    std::string error = t.error;
    std::replace(error.begin(), error.end(), ',', ';');
    std::replace(error.begin(), error.end(), '\n', ' ');
    out << agent << ',' << env << ',' << t.trial << ',' << t.seed << ',' << (t.ok ? "ok" : "failed") << ',';
    if (t.ok) {
      out << format_number(t.max_smoothed_return) << ',' << optional_cell(t.max_smoothed_eval_return) << ','
          << format_number(t.final_smoothed_return) << ',' << optional_cell(t.final_smoothed_eval_return);
    } else {
      out << ",,,";
    }
    out << ',' << t.episodes << ',' << t.steps << ',' << error << "\n";
  }
}

void write_summary_csv(const std::string& path, std::span<const SummaryRow> rows) {
  auto out = open_out(path);
  out << "agent,env,trials_ok,trials_failed,max_smoothed_return_mean,max_smoothed_return_std,"
         "max_smoothed_eval_return_mean,max_smoothed_eval_return_std\n";
  for (const auto& r : rows) {
    out << r.agent << ',' << r.env << ',' << r.trials_ok << ',' << r.trials_failed << ','
        << format_number(r.max_smoothed_return.mean) << ',' << format_number(r.max_smoothed_return.stddev) << ',';
    if (r.max_smoothed_eval_return) {
      out << format_number(r.max_smoothed_eval_return->mean) << ','
          << format_number(r.max_smoothed_eval_return->stddev);
    } else {
      out << ',';
    }
    out << "\n";
  }
}

}  // namespace amtd
