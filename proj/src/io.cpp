#include "rombit/io.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace rombit {

using nlohmann::json;

namespace {

Rational number_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_number_float()) return approximate(j.get<double>());
  if (j.is_array() && j.size() == 2 && j[0].is_number_integer() && j[1].is_number_integer()) {
    const auto den = j[1].get<std::int64_t>();
    if (den == 0) throw InputError("zero denominator");
    return Rational(j[0].get<std::int64_t>(), den);
  }
  throw InputError("expected a number or [num, den] pair, got " + j.dump());
}

json number_to_json(const Rational& q) {
  if (q.denominator() == 1) return q.numerator();
  return json::array({q.numerator(), q.denominator()});
}

}  // namespace

Instance parse_instance(const std::string& line, std::size_t line_no) {
  try {
    const json j = json::parse(line);
    if (!j.is_object()) throw InputError("expected a JSON object");
    Instance inst;
    if (!j.contains("problem") || !j["problem"].is_string()) throw InputError("missing 'problem'");
    inst.problem = parse_problem(j["problem"].get<std::string>());
    inst.id = j.value("id", std::to_string(line_no));
    if (j.contains("meta")) {
      for (auto& [name, value] : j["meta"].items()) inst.meta[name] = number_from_json(value);
    }
    if (j.contains("weight_fn")) {
      for (const auto& point : j["weight_fn"]) {
        if (!point.is_array() || point.size() != 2) throw InputError("weight_fn entries are [length, weight]");
        inst.weight_fn.emplace_back(number_from_json(point[0]), number_from_json(point[1]));
      }
    }
    if (!j.contains("items") || !j["items"].is_array()) throw InputError("missing 'items'");
    for (const auto& it : j["items"]) {
      Item item;
      if (it.contains("payload"))
        for (auto& [name, value] : it["payload"].items()) item.payload[name] = number_from_json(value);
      if (it.contains("key")) {
        for (const auto& c : it["key"]) item.key.coords.push_back(number_from_json(c));
      } else {
        item.key = derive_key(inst.problem, item.payload, inst.meta);
      }
      inst.items.push_back(std::move(item));
    }
    validate(inst);
    return inst;
  } catch (const json::exception& e) {
    throw ParseError(line_no, e.what());
  } catch (const InputError& e) {
    throw ParseError(line_no, e.what());
  } catch (const std::out_of_range& e) {
    throw ParseError(line_no, e.what());
  }
}

std::string format_instance(const Instance& inst) {
  json j;
  j["id"] = inst.id;
  j["problem"] = std::string(to_string(inst.problem));
  j["meta"] = json::object();
  for (const auto& [name, value] : inst.meta) j["meta"][name] = number_to_json(value);
  if (!inst.weight_fn.empty()) {
    json fn = json::array();
    for (const auto& [len, w] : inst.weight_fn) fn.push_back({number_to_json(len), number_to_json(w)});
    j["weight_fn"] = fn;
  }
  json items = json::array();
  for (const auto& item : inst.items) {
    json key = json::array();
    for (const auto& c : item.key.coords) key.push_back(number_to_json(c));
    json payload = json::object();
    for (const auto& [name, value] : item.payload) payload[name] = number_to_json(value);
    items.push_back({{"key", key}, {"payload", payload}});
  }
  j["items"] = items;
  return j.dump();
}

std::vector<Instance> read_instances(std::istream& in) {
  std::vector<Instance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(parse_instance(line, line_no));
  }
  return out;
}

std::vector<Instance> read_instances(const std::string& path) {
  if (path == "-") return read_instances(std::cin);
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return read_instances(in);
}

void write_instances(std::ostream& out, const std::vector<Instance>& instances) {
  for (const auto& inst : instances) out << format_instance(inst) << '\n';
}

void write_instances(const std::string& path, const std::vector<Instance>& instances) {
  if (path == "-") return write_instances(std::cout, instances);
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  write_instances(out, instances);
}

ReportFormat parse_format(const std::string& tag) {
  if (tag == "csv") return ReportFormat::csv;
  if (tag == "jsonl") return ReportFormat::jsonl;
  throw InputError("unknown report format '" + tag + "'");
}

namespace {

std::string fmt_double(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

}  // namespace

void write_report(std::ostream& out, const std::vector<ReportRow>& rows, ReportFormat format) {
  if (format == ReportFormat::csv) {
    out << kReportHeader << '\n';
    for (const auto& r : rows) {
      out << r.instance_id << ',' << r.problem << ',' << r.model << ',' << r.trials << ',' << r.seed
          << ',' << fmt_double(r.mean_alg) << ',' << fmt_double(r.opt) << ','
          << fmt_double(r.empirical_ratio) << ',' << (r.stderr_ ? fmt_double(*r.stderr_) : "")
          << '\n';
    }
    return;
  }
  for (const auto& r : rows) {
    json j = {{"instance_id", r.instance_id}, {"problem", r.problem}, {"model", r.model},
              {"trials", r.trials},           {"seed", r.seed},       {"mean_alg", r.mean_alg},
              {"opt", r.opt},                 {"empirical_ratio", r.empirical_ratio}};
    j["stderr"] = r.stderr_ ? json(*r.stderr_) : json(nullptr);
    out << j.dump() << '\n';
  }
}

void write_report(const std::string& path, const std::vector<ReportRow>& rows, ReportFormat format) {
  if (path.empty() || path == "-") return write_report(std::cout, rows, format);
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  write_report(out, rows, format);
}

std::vector<ReportRow> read_report_csv(std::istream& in) {
  std::vector<ReportRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != kReportHeader) throw ParseError(1, "unexpected report header");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() == 8) cells.emplace_back();
    if (cells.size() != 9) throw ParseError(line_no, "expected 9 columns");
    try {
      ReportRow r;
      r.instance_id = cells[0];
      r.problem = cells[1];
      r.model = cells[2];
      r.trials = std::stoull(cells[3]);
      r.seed = std::stoull(cells[4]);
      r.mean_alg = std::stod(cells[5]);
      r.opt = std::stod(cells[6]);
      r.empirical_ratio = std::stod(cells[7]);
      if (!cells[8].empty()) r.stderr_ = std::stod(cells[8]);
      rows.push_back(std::move(r));
    } catch (const std::logic_error& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return rows;
}

}  // namespace rombit
