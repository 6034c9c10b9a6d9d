#include "clinichat/report.hpp"

#include <algorithm>

#include "clinichat/text.hpp"

namespace clinichat::report {

using nlohmann::json;

namespace {

std::string pad_left(const std::string& s, size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

std::vector<std::string> metric_ids(const evalx::Rubric& rubric) {
  std::vector<std::string> ids;
  for (const auto& g : rubric.groups()) ids.push_back(g.id);
  ids.push_back("total");
  return ids;
}

std::string metric_header(const evalx::Rubric& rubric, const std::string& id) {
  if (id == "total") return "Total Score";
  return rubric.find_node(id)->name;
}

// rank[metric][row] = 1 for the best value, 2 for the second best.
std::map<std::string, std::map<size_t, int>> compute_ranks(const std::vector<MethodRow>& rows,
                                                           const std::vector<std::string>& ids) {
  std::map<std::string, std::map<size_t, int>> ranks;
  if (rows.size() < 2) return ranks;
  for (const auto& id : ids) {
    std::vector<std::pair<double, size_t>> values;
    for (size_t i = 0; i < rows.size(); ++i) {
      auto it = rows[i].eval.means.find(id);
      if (it != rows[i].eval.means.end()) values.push_back({it->second, i});
    }
    std::stable_sort(values.begin(), values.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    if (!values.empty()) ranks[id][values[0].second] = 1;
    if (values.size() > 1) ranks[id][values[1].second] = 2;
  }
  return ranks;
}

std::string mark(const std::string& value, int rank) {
  if (rank == 1) return "**" + value + "**";
  if (rank == 2) return "_" + value + "_";
  return value;
}

// Deltas annotate the history, techniques, and total columns.
bool delta_column(const std::string& id) {
  return id == "history" || id == "techniques" || id == "total";
}

}  // namespace

std::string format_delta(int pct) {
  return (pct >= 0 ? "(+" : "(") + std::to_string(pct) + "%)";
}

std::vector<std::string> table_columns(const evalx::Rubric& rubric) {
  std::vector<std::string> cols = {"Avg. Turns", "Avg. Words Phys. / Pt."};
  for (const auto& id : metric_ids(rubric)) cols.push_back(metric_header(rubric, id));
  return cols;
}

json method_table_json(const std::vector<MethodRow>& rows, const evalx::Rubric& rubric) {
  const auto ids = metric_ids(rubric);
  const auto ranks = compute_ranks(rows, ids);
  json out;
  out["layout"] = "methods";
  out["columns"] = table_columns(rubric);
  json jrows = json::array();
  for (size_t i = 0; i < rows.size(); ++i) {
    const MethodRow& row = rows[i];
    json r;
    r["method"] = row.method;
    r["n"] = row.eval.n;
    if (row.stats) {
      r["avg_turns"] = row.stats->avg_turns;
      r["avg_words_physician"] = row.stats->avg_words_physician;
      r["avg_words_patient"] = row.stats->avg_words_patient;
    }
    json metrics = json::object();
    for (const auto& id : ids) {
      json m;
      m["value"] = row.eval.means.at(id);
      auto rit = ranks.find(id);
      if (rit != ranks.end()) {
        auto rr = rit->second.find(i);
        if (rr != rit->second.end()) m["rank"] = rr->second;
      }
      auto dit = row.eval.deltas_pct.find(id);
      if (dit != row.eval.deltas_pct.end()) m["delta_pct"] = dit->second;
      metrics[id] = m;
    }
    r["metrics"] = metrics;
    jrows.push_back(r);
  }
  out["rows"] = jrows;
  return out;
}

std::string method_table_text(const std::vector<MethodRow>& rows, const evalx::Rubric& rubric) {
  const auto ids = metric_ids(rubric);
  const auto ranks = compute_ranks(rows, ids);
  std::vector<std::string> headers = table_columns(rubric);
  headers.insert(headers.begin(), "Method");

  std::vector<std::vector<std::string>> cells;
  for (size_t i = 0; i < rows.size(); ++i) {
    const MethodRow& row = rows[i];
    std::vector<std::string> line;
    line.push_back(row.method);
    if (row.stats) {
      line.push_back(text::format_double(row.stats->avg_turns, 1));
      line.push_back(text::format_double(row.stats->avg_words_physician, 1) + " / " +
                     text::format_double(row.stats->avg_words_patient, 1));
    } else {
      line.push_back("-");
      line.push_back("-");
    }
    for (const auto& id : ids) {
      std::string value = text::format_double(row.eval.means.at(id), 2);
      auto dit = row.eval.deltas_pct.find(id);
      if (dit != row.eval.deltas_pct.end() && delta_column(id)) {
        value += " " + format_delta(dit->second);
      }
      int rank = 0;
      auto rit = ranks.find(id);
      if (rit != ranks.end()) {
        auto rr = rit->second.find(i);
        if (rr != rit->second.end()) rank = rr->second;
      }
      line.push_back(mark(value, rank));
    }
    cells.push_back(std::move(line));
  }

  std::vector<size_t> widths(headers.size());
  for (size_t c = 0; c < headers.size(); ++c) {
    widths[c] = headers[c].size();
    for (const auto& line : cells) widths[c] = std::max(widths[c], line[c].size());
  }
  std::string out = pad_right(headers[0], widths[0]);
  for (size_t c = 1; c < headers.size(); ++c) out += "  " + pad_left(headers[c], widths[c]);
  out += '\n';
  for (const auto& line : cells) {
    out += pad_right(line[0], widths[0]);
    for (size_t c = 1; c < line.size(); ++c) out += "  " + pad_left(line[c], widths[c]);
    out += '\n';
  }
  return out;
}

json department_table_json(const std::vector<MethodRow>& rows, const evalx::Rubric& rubric) {
  const auto ids = metric_ids(rubric);
  json out;
  out["layout"] = "departments";
  json columns = json::array();
  for (const auto& id : ids) columns.push_back(metric_header(rubric, id));
  out["columns"] = columns;
  json jrows = json::array();
  for (const MethodRow& row : rows) {
    for (const auto& [bucket, b] : row.eval.buckets) {
      json r;
      r["method"] = row.method;
      r["department"] = bucket;
      r["n"] = b.n;
      json metrics = json::object();
      for (const auto& id : ids) {
        json m;
        m["value"] = b.means.at(id);
        auto bd = row.eval.bucket_deltas_pct.find(bucket);
        if (bd != row.eval.bucket_deltas_pct.end()) {
          auto dd = bd->second.find(id);
          if (dd != bd->second.end()) m["delta_pct"] = dd->second;
        }
        metrics[id] = m;
      }
      r["metrics"] = metrics;
      jrows.push_back(r);
    }
  }
  out["rows"] = jrows;
  return out;
}

std::string department_table_text(const std::vector<MethodRow>& rows,
                                  const evalx::Rubric& rubric) {
  const auto ids = metric_ids(rubric);
  std::vector<std::string> headers = {"Method", "Department"};
  for (const auto& id : ids) headers.push_back(metric_header(rubric, id));

  std::vector<std::vector<std::string>> cells;
  for (const MethodRow& row : rows) {
    for (const auto& [bucket, b] : row.eval.buckets) {
      std::vector<std::string> line = {row.method, bucket};
      for (const auto& id : ids) {
        std::string value = text::format_double(b.means.at(id), 2);
        auto bd = row.eval.bucket_deltas_pct.find(bucket);
        if (bd != row.eval.bucket_deltas_pct.end() && delta_column(id)) {
          auto dd = bd->second.find(id);
          if (dd != bd->second.end()) value += " " + format_delta(dd->second);
        }
        line.push_back(value);
      }
      cells.push_back(std::move(line));
    }
  }

  std::vector<size_t> widths(headers.size());
  for (size_t c = 0; c < headers.size(); ++c) {
    widths[c] = headers[c].size();
    for (const auto& line : cells) widths[c] = std::max(widths[c], line[c].size());
  }
  std::string out = pad_right(headers[0], widths[0]) + "  " + pad_right(headers[1], widths[1]);
  for (size_t c = 2; c < headers.size(); ++c) out += "  " + pad_left(headers[c], widths[c]);
  out += '\n';
  for (const auto& line : cells) {
    out += pad_right(line[0], widths[0]) + "  " + pad_right(line[1], widths[1]);
    for (size_t c = 2; c < line.size(); ++c) out += "  " + pad_left(line[c], widths[c]);
    out += '\n';
  }
  return out;
}

std::string stats_table_text(const corpus::DatasetStats& stats) {
  std::vector<std::pair<std::string, std::string>> lines = {
      {"Statistical Index", "Value"},
      {"Dialogues", std::to_string(stats.n_dialogues)},
      {"Max dialogue turns", std::to_string(stats.max_turns)},
      {"Min dialogue turns", std::to_string(stats.min_turns)},
      {"Avg. dialogue turns", text::format_double(stats.avg_turns, 1)},
      {"Avg. words in a patient utterance", text::format_double(stats.avg_words_patient, 1)},
      {"Avg. words in a physician utterance", text::format_double(stats.avg_words_physician, 1)},
  };
  size_t left = 0;
  for (const auto& [k, v] : lines) left = std::max(left, k.size());
  std::string out;
  for (const auto& [k, v] : lines) out += pad_right(k, left) + "  " + v + '\n';
  return out;
}

}  // namespace clinichat::report
