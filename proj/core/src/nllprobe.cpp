#include "longwrite/nllprobe.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "longwrite/jsonl.hpp"

namespace longwrite::nllprobe {
namespace {

using nlohmann::json;

std::string fmt_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "0";
  return std::string(buf, ptr);
}

}  // namespace

NllSeries make_series(std::string doc_id, std::vector<double> nll) {
  NllSeries series;
  series.doc_id = std::move(doc_id);
  series.token_count = static_cast<int64_t>(nll.size());
  series.nll = std::move(nll);
  validate(series);
  return series;
}

void validate(const NllSeries& series) {
  if (series.nll.empty()) {
    throw std::invalid_argument("series " + series.doc_id + " is empty");
  }
  if (series.token_count != static_cast<int64_t>(series.nll.size())) {
    throw std::invalid_argument("series " + series.doc_id + " token_count " +
                                std::to_string(series.token_count) + " != length " +
                                std::to_string(series.nll.size()));
  }
  for (size_t i = 0; i < series.nll.size(); ++i) {
    if (!(series.nll[i] >= 0.0)) {  // also catches NaN
      throw std::invalid_argument("series " + series.doc_id + " has negative NLL at index " +
                                  std::to_string(i));
    }
  }
}

std::vector<double> cumulative_average(const NllSeries& series) {
  validate(series);
  std::vector<double> out(series.nll.size());
  double sum = 0.0;
  for (size_t i = 0; i < series.nll.size(); ++i) {
    sum += series.nll[i];
    out[i] = sum / static_cast<double>(i + 1);
  }
  return out;
}

AggregateCurve aggregate_curves(std::span<const NllSeries> series_set,
                                std::span<const int64_t> positions) {
  if (positions.empty()) throw std::invalid_argument("empty position grid");
  for (int64_t p : positions) {
    if (p < 1) throw std::invalid_argument("positions must be >= 1");
  }
  int64_t max_position = *std::max_element(positions.begin(), positions.end());

  AggregateCurve curve;
  curve.positions.assign(positions.begin(), positions.end());
  curve.mean_nll.assign(positions.size(), 0.0);

  std::vector<double> sums(positions.size(), 0.0);
  for (const auto& series : series_set) {
    validate(series);
    if (series.token_count < max_position) {
      ++curve.excluded_count;
      continue;
    }
    std::vector<double> averages = cumulative_average(series);
    for (size_t i = 0; i < positions.size(); ++i) {
      sums[i] += averages[static_cast<size_t>(positions[i] - 1)];
    }
    ++curve.included_count;
  }
  if (curve.included_count > 0) {
    for (size_t i = 0; i < sums.size(); ++i) {
      curve.mean_nll[i] = sums[i] / curve.included_count;
    }
  }
  return curve;
}

bool long_range_dependency_flag(std::span<const double> curve, double margin) {
  if (curve.size() < 2) throw std::invalid_argument("curve needs at least 2 points");
  return curve.front() - curve.back() > margin;
}

std::vector<NllSeries> load_nll_jsonl(const std::filesystem::path& path) {
  std::vector<NllSeries> all;
  std::set<std::string> seen;
  for_each_jsonl_line(path, [&](std::string_view line, size_t line_no) {
    json entry;
    try {
      entry = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("bad JSON: ") + e.what(), line_no);
    }
    NllSeries series;
    try {
      series.doc_id = entry.at("doc_id").get<std::string>();
      const json& values = entry.at("nll");
      if (!values.is_array()) throw SchemaError("nll must be an array", line_no);
      series.nll.reserve(values.size());
      for (const auto& value : values) {
        if (!value.is_number()) throw SchemaError("nll entries must be numbers", line_no);
        series.nll.push_back(value.get<double>());
      }
      series.token_count = static_cast<int64_t>(series.nll.size());
      if (entry.contains("token_count") &&
          entry["token_count"].get<int64_t>() != series.token_count) {
        throw SchemaError("token_count does not match nll length", line_no);
      }
    } catch (const json::exception& e) {
      throw SchemaError(std::string("bad field: ") + e.what(), line_no);
    }
    if (series.doc_id.empty()) throw SchemaError("empty doc_id", line_no);
    if (!seen.insert(series.doc_id).second) {
      throw SchemaError("duplicate doc_id: " + series.doc_id, line_no);
    }
    try {
      validate(series);
    } catch (const std::invalid_argument& e) {
      throw SchemaError(e.what(), line_no);
    }
    all.push_back(std::move(series));
  });
  return all;
}

std::string curve_csv(const AggregateCurve& curve) {
  std::ostringstream out;
  out << "position,mean_nll,doc_count\n";
  for (size_t i = 0; i < curve.positions.size(); ++i) {
    out << curve.positions[i] << ",";
    if (curve.included_count > 0) out << fmt_double(curve.mean_nll[i]);
    out << "," << curve.included_count << "\n";
  }
  return out.str();
}

}  // namespace longwrite::nllprobe
