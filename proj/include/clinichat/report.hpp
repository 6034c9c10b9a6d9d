#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "clinichat/corpus.hpp"
#include "clinichat/evalx.hpp"

namespace clinichat::report {

// One table row: a generation method with its dialogue statistics and
// evaluation means.
struct MethodRow {
  std::string method;
  std::optional<corpus::DatasetStats> stats;
  evalx::EvalReport eval;
};

// Fixed column order of the evaluation tables: the two statistical indices,
// the six metric groups in rubric order, then the total.
std::vector<std::string> table_columns(const evalx::Rubric& rubric);

// Machine layout shared by both renderers. Rows carry raw values, ranks
// (1 = best, 2 = second best, when there are >= 2 rows), and deltas when a
// baseline was aggregated in.
nlohmann::json method_table_json(const std::vector<MethodRow>& rows, const evalx::Rubric& rubric);
std::string method_table_text(const std::vector<MethodRow>& rows, const evalx::Rubric& rubric);

// Per-department layout: one row per (method, department) bucket, metric
// columns only. Delta annotations follow the history / techniques / total
// convention.
nlohmann::json department_table_json(const std::vector<MethodRow>& rows,
                                     const evalx::Rubric& rubric);
std::string department_table_text(const std::vector<MethodRow>& rows,
                                  const evalx::Rubric& rubric);

std::string stats_table_text(const corpus::DatasetStats& stats);

// "+71%" / "-12%" style annotation.
std::string format_delta(int pct);

}  // namespace clinichat::report
