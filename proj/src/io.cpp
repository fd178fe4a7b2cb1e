#include "dopt/io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace dopt {

namespace {

using nlohmann::json;

int line_of_offset(const std::string& text, size_t offset) {
  int line = 1;
  for (size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError("line " + std::to_string(line_of_offset(text, e.byte)) +
                  ": " + e.what());
  }
}

SolveStatus status_from_string(const std::string& s) {
  if (s == "Converged") return SolveStatus::Converged;
  if (s == "MaxIters") return SolveStatus::MaxIters;
  if (s == "CollapsedToX0") return SolveStatus::CollapsedToX0;
  if (s == "ShortcutSize") return SolveStatus::ShortcutSize;
  if (s == "ShortcutCost") return SolveStatus::ShortcutCost;
  throw IoError("unknown solver status '" + s + "'");
}

}  // namespace

LoadedProblem parse_problem(const std::string& text) {
  json doc = parse_json(text);
  if (!doc.is_object()) throw IoError("line 1: problem file must be a JSON object");
  if (!doc.contains("m") || !doc["m"].is_number_integer())
    throw IoError("missing integer field 'm'");
  if (!doc.contains("points") || !doc["points"].is_array() || doc["points"].empty())
    throw IoError("missing nonempty array field 'points'");

  const int m = doc["m"].get<int>();
  const bool has_budget = doc.contains("budget");
  const bool has_two = doc.contains("c1") || doc.contains("c2");
  if (has_budget && has_two)
    throw IoError("'budget' and 'c1'/'c2' blocks are mutually exclusive");
  if (doc.contains("c1") != doc.contains("c2"))
    throw IoError("'c1' and 'c2' must be given together");

  std::vector<DesignPoint> points;
  points.reserve(doc["points"].size());
  size_t index = 0;
  for (const auto& jp : doc["points"]) {
    ++index;
    if (!jp.is_object() || !jp.contains("id") || !jp.contains("f") || !jp.contains("cost"))
      throw IoError("point " + std::to_string(index) +
                    ": expected fields id, f, cost");
    if (!jp["f"].is_array() || jp["f"].size() != static_cast<size_t>(m))
      throw IoError("point " + std::to_string(index) + ": regressor must have length " +
                    std::to_string(m));
    DesignPoint p;
    p.id = jp["id"].get<std::string>();
    p.f.resize(m);
    for (int k = 0; k < m; ++k) p.f(k) = jp["f"][static_cast<size_t>(k)].get<double>();
    p.cost = jp["cost"].get<double>();
    points.push_back(std::move(p));
  }

  try {
    if (has_two) {
      const size_t n = points.size();
      if (doc["c1"].size() != n || doc["c2"].size() != n)
        throw IoError("'c1'/'c2' length must match the point count");
      Eigen::VectorXd c1(n), c2(n);
      for (size_t i = 0; i < n; ++i) {
        c1(static_cast<long>(i)) = doc["c1"][i].get<double>();
        c2(static_cast<long>(i)) = doc["c2"][i].get<double>();
      }
      auto [inst, back] = general_two_constraint_to_canonical(m, points, c1, c2);
      return {std::move(inst), std::move(back)};
    }
    if (has_budget) {
      const auto& jb = doc["budget"];
      if (!jb.contains("N") || !jb.contains("B"))
        throw IoError("'budget' must contain N and B");
      Eigen::VectorXd raw(points.size());
      for (size_t i = 0; i < points.size(); ++i) raw(static_cast<long>(i)) = points[i].cost;
      Eigen::VectorXd c = normalize_costs(raw, jb["N"].get<long>(), jb["B"].get<double>());
      for (size_t i = 0; i < points.size(); ++i) points[i].cost = c(static_cast<long>(i));
    }
    BackMap back;
    back.kind = BackMapKind::Identity;
    back.scale = Eigen::VectorXd::Ones(static_cast<long>(points.size()));
    return {DesignInstance(m, std::move(points)), std::move(back)};
  } catch (const std::invalid_argument& e) {
    throw IoError(std::string("invalid problem: ") + e.what());
  }
}

LoadedProblem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str());
}

std::string serialize_problem(const DesignInstance& instance) {
  json doc;
  doc["m"] = instance.m();
  doc["points"] = json::array();
  for (int i = 0; i < instance.n(); ++i) {
    const DesignPoint& p = instance.point(i);
    json jp;
    jp["id"] = p.id;
    jp["f"] = std::vector<double>(p.f.data(), p.f.data() + p.f.size());
    jp["cost"] = p.cost;
    doc["points"].push_back(std::move(jp));
  }
  return doc.dump(2) + "\n";
}

std::string serialize_report(const DesignInstance& instance, const SolverReport& report) {
  json doc;
  doc["weights"] = json::array();
  for (int i = 0; i < instance.n(); ++i)
    doc["weights"].push_back({{"id", instance.point(i).id}, {"w", report.design.w(i)}});
  doc["phi"] = report.phi;
  doc["eff_lb"] = report.eff_lb;
  doc["iterations"] = report.iterations;
  doc["status"] = to_string(report.status);
  doc["guard_warning"] = report.guard_warning;
  doc["deletions"] = json::array();
  for (const auto& ev : report.deletions)
    doc["deletions"].push_back({{"iter", ev.iter}, {"ids", ev.removed_ids}});
  doc["trace"] = json::array();
  for (const auto& tp : report.trace)
    doc["trace"].push_back({{"iter", tp.iter},
                            {"phi", tp.phi},
                            {"eff_lb", tp.eff_lb},
                            {"active_n", tp.active_n},
                            {"elapsed_s", tp.elapsed_s}});
  return doc.dump(2) + "\n";
}

SolverReport parse_report(const DesignInstance& instance, const std::string& text) {
  json doc = parse_json(text);
  SolverReport report;
  if (!doc.contains("weights") || !doc["weights"].is_array())
    throw IoError("report is missing 'weights'");
  if (doc["weights"].size() != static_cast<size_t>(instance.n()))
    throw IoError("report weight count does not match the problem");
  report.design.w = Eigen::VectorXd::Zero(instance.n());
  for (int i = 0; i < instance.n(); ++i) {
    const auto& jw = doc["weights"][static_cast<size_t>(i)];
    if (jw["id"].get<std::string>() != instance.point(i).id)
      throw IoError("report weight id mismatch at position " + std::to_string(i + 1));
    report.design.w(i) = jw["w"].get<double>();
  }
  report.phi = doc.value("phi", 0.0);
  report.eff_lb = doc.value("eff_lb", 0.0);
  report.iterations = doc.value("iterations", 0L);
  report.guard_warning = doc.value("guard_warning", false);
  if (doc.contains("status")) report.status = status_from_string(doc["status"]);
  return report;
}

Design parse_design_file(const DesignInstance& instance, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();

  // Report JSON or an "id,w" CSV.
  size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{')
    return parse_report(instance, text).design;

  Design design;
  design.w = Eigen::VectorXd::Zero(instance.n());
  std::istringstream lines(text);
  std::string line;
  int lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (line.empty() || line == "id,w") continue;
    const size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw IoError("line " + std::to_string(lineno) + ": expected 'id,w'");
    const std::string id = line.substr(0, comma);
    const double w = std::stod(line.substr(comma + 1));
    bool found = false;
    for (int i = 0; i < instance.n(); ++i)
      if (instance.point(i).id == id) {
        design.w(i) = w;
        found = true;
        break;
      }
    if (!found)
      throw IoError("line " + std::to_string(lineno) + ": unknown point id '" + id + "'");
  }
  return design;
}

void write_trace_csv(std::ostream& out, const SolverReport& report) {
  out << "iter,phi,eff_lb,active_n,elapsed_s\n";
  out.precision(17);
  for (const auto& tp : report.trace)
    out << tp.iter << ',' << tp.phi << ',' << tp.eff_lb << ',' << tp.active_n << ','
        << tp.elapsed_s << '\n';
}

}  // namespace dopt
