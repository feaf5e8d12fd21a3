#pragma once

// Report rows shared by the checks, and their CSV form.

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "svito/convex_set.hpp"
#include "svito/text.hpp"

namespace svito {

/// `lo,hi` columns of a set; box coordinates are `;`-joined inside each column.
inline std::string set_columns(const std::optional<ConvexSet>& s) {
  if (!s) return "nan,nan";
  switch (s->kind()) {
    case SetKind::Interval: return format_double(s->as_interval().lo) + "," + format_double(s->as_interval().hi);
    case SetKind::Box: {
      const auto& b = s->as_box();
      std::string lo, hi;
      for (std::size_t i = 0; i < b.lo.size(); ++i) {
        lo += (i ? ";" : "") + format_double(b.lo[i]);
        hi += (i ? ";" : "") + format_double(b.hi[i]);
      }
      return lo + "," + hi;
    }
    case SetKind::SupportSampled: {
      // Grid support values go in the hi column; the lo column only tags the carrier.
      std::string hi;
      const auto& h = s->as_support().h;
      for (std::size_t j = 0; j < h.size(); ++j) hi += (j ? ";" : "") + format_double(h[j]);
      return "support," + hi;
    }
  }
  return "nan,nan";
}

struct ReportRow {
  std::string check;
  std::size_t node = 0;
  std::size_t path = 0;
  std::optional<ConvexSet> lhs, rhs;
  double hausdorff = 0.0;
};

inline constexpr const char* kReportHeader = "check,node,path,lhs_lo,lhs_hi,rhs_lo,rhs_hi,hausdorff";

inline void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows, bool header = true) {
  if (header) out << kReportHeader << '\n';
  for (const auto& r : rows)
    out << r.check << ',' << r.node << ',' << r.path << ',' << set_columns(r.lhs) << ',' << set_columns(r.rhs) << ','
        << format_double(r.hausdorff) << '\n';
}

/// Named scalar outcome of a check.
struct Metric {
  std::string name;
  double value = 0.0;
};

struct CheckReport {
  std::string name;
  std::vector<ReportRow> rows;
  std::vector<Metric> metrics;
  bool passed = false;
  std::string verdict;

  double metric(const std::string& key) const {
    for (const auto& m : metrics)
      if (m.name == key) return m.value;
    return NAN;
  }
  void set(const std::string& key, double value) {
    for (auto& m : metrics)
      if (m.name == key) {
        m.value = value;
        return;
      }
    metrics.push_back({key, value});
  }
};

inline void write_metrics_csv(std::ostream& out, const std::vector<CheckReport>& reports) {
  out << "check,metric,value\n";
  for (const auto& r : reports)
    for (const auto& m : r.metrics) out << r.name << ',' << m.name << ',' << format_double(m.value) << '\n';
}

}  // namespace svito
