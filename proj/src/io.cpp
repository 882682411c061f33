#include "bgt/io.hpp"

#include <fstream>
#include <sstream>

namespace bgt {

Json rational_json(const Rational& value) { return to_string(value); }

Rational rational_from_json(const Json& value, const std::string& field) {
  try {
    if (value.is_string()) return parse_rational(value.get<std::string>());
    if (value.is_number_integer()) {
      return value.is_number_unsigned() ? Rational(BigInt(std::to_string(value.get<std::uint64_t>())))
                                        : make_rational(value.get<std::int64_t>());
    }
    if (value.is_number_float()) {
      // Use the literal text so 0.1 stays exactly 1/10.
      return parse_rational(value.dump());
    }
  } catch (const std::invalid_argument& e) {
    throw InputError("field '" + field + "': " + e.what());
  }
  throw InputError("field '" + field + "' must be a fraction string or a number");
}

Instance instance_from_json(const Json& doc) {
  if (!doc.is_object()) throw InputError("instance must be a JSON object");
  if (!doc.contains("rates")) throw InputError("field 'rates' is missing");
  const Json& jr = doc.at("rates");
  if (!jr.is_array() || jr.empty()) throw InputError("field 'rates' must be a nonempty array");
  std::vector<Rational> rates;
  for (std::size_t i = 0; i < jr.size(); ++i) {
    rates.push_back(rational_from_json(jr[i], "rates[" + std::to_string(i) + "]"));
  }
  Instance inst;
  try {
    inst.rates = RateVector(rates);
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("field 'rates': ") + e.what());
  }
  if (doc.contains("start")) {
    const Json& js = doc.at("start");
    if (!js.is_number_integer() || js.get<std::int64_t>() < 1 ||
        js.get<std::uint64_t>() > inst.rates.size()) {
      throw InputError("field 'start' must be an index in 1..n");
    }
    inst.start = js.get<std::size_t>() - 1;
  }
  if (doc.contains("travel")) {
    const Json& jt = doc.at("travel");
    if (!jt.is_array()) throw InputError("field 'travel' must be a square matrix");
    std::vector<std::vector<Rational>> travel;
    for (std::size_t i = 0; i < jt.size(); ++i) {
      if (!jt[i].is_array()) throw InputError("field 'travel[" + std::to_string(i) + "]' must be an array");
      std::vector<Rational> row;
      for (std::size_t j = 0; j < jt[i].size(); ++j) {
        row.push_back(rational_from_json(jt[i][j],
                                         "travel[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
      }
      travel.push_back(std::move(row));
    }
    try {
      inst.metric.emplace(inst.rates, std::move(travel), inst.start);
    } catch (const std::invalid_argument& e) {
      throw InputError(std::string("field 'travel': ") + e.what());
    } catch (const std::overflow_error& e) {
      throw InputError(std::string("field 'travel': ") + e.what());
    }
  }
  return inst;
}

Json instance_to_json(const RateVector& rates) {
  Json doc;
  doc["rates"] = Json::array();
  for (const auto& r : rates.rates()) doc["rates"].push_back(rational_json(r));
  return doc;
}

Json instance_to_json(const MetricInstance& instance) {
  Json doc = instance_to_json(instance.rates());
  Json travel = Json::array();
  for (std::size_t i = 0; i < instance.size(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < instance.size(); ++j) row.push_back(rational_json(instance.travel(i, j)));
    travel.push_back(std::move(row));
  }
  doc["travel"] = std::move(travel);
  doc["start"] = instance.start() + 1;
  return doc;
}

Json schedule_to_json(const CyclicSchedule& schedule) {
  Json doc;
  if (schedule.is_residue()) {
    Json arr = Json::array();
    for (const auto& e : schedule.residue().entries) arr.push_back({e.offset, e.period});
    doc["residue"] = std::move(arr);
  } else {
    doc["preamble"] = schedule.list().preamble;
    doc["period"] = schedule.list().period;
  }
  return doc;
}

namespace {

std::uint64_t positive_integer(const Json& v, const std::string& field) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
    throw InputError("field '" + field + "' must be a positive integer");
  }
  return v.get<std::uint64_t>();
}

std::vector<std::size_t> id_list(const Json& v, const std::string& field, std::size_t n) {
  if (!v.is_array()) throw InputError("field '" + field + "' must be an array");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Json& x = v[i];
    std::string name = field + "[" + std::to_string(i) + "]";
    if (!x.is_number_integer() || x.get<std::int64_t>() < 0 || x.get<std::uint64_t>() > n) {
      throw InputError("field '" + name + "' must be 0 (idle) or a bamboo index in 1.." +
                       std::to_string(n));
    }
    out.push_back(x.get<std::size_t>());
  }
  return out;
}

}  // namespace

CyclicSchedule schedule_from_json(const Json& doc, std::size_t n) {
  if (!doc.is_object()) throw InputError("schedule must be a JSON object");
  if (doc.contains("residue")) {
    const Json& arr = doc.at("residue");
    if (!arr.is_array() || arr.size() != n) {
      throw InputError("field 'residue' must list one [offset, period] pair per bamboo");
    }
    ResidueForm form;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      std::string name = "residue[" + std::to_string(i) + "]";
      if (!arr[i].is_array() || arr[i].size() != 2) throw InputError("field '" + name + "' must be a pair");
      form.entries.push_back({positive_integer(arr[i][0], name + "[0]"),
                              positive_integer(arr[i][1], name + "[1]")});
    }
    return CyclicSchedule(n, std::move(form));
  }
  if (doc.contains("period")) {
    ListForm form;
    if (doc.contains("preamble")) form.preamble = id_list(doc.at("preamble"), "preamble", n);
    form.period = id_list(doc.at("period"), "period", n);
    if (form.period.empty()) throw InputError("field 'period' must be nonempty");
    return CyclicSchedule(n, std::move(form));
  }
  throw InputError("schedule needs a 'residue' or a 'period' field");
}

Json report_to_json(const SimulationReport& report) {
  Json doc;
  Json per = Json::array();
  for (const auto& v : report.per_bamboo_max) per.push_back(rational_json(v));
  doc["per_bamboo_max"] = std::move(per);
  doc["global_max"] = rational_json(report.global_max);
  doc["argmax_bamboo"] = report.argmax_bamboo;
  doc["argmax_time"] = rational_json(report.argmax_time);
  doc["steady_state_max"] = rational_json(report.steady_state_max);
  doc["horizon"] = rational_json(report.horizon);
  return doc;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

void write_walk_csv(std::ostream& out, const MetricInstance& instance, const TickWalk& walk) {
  out << "step,point,time\n";
  for (std::size_t s = 0; s < walk.size(); ++s) {
    out << s + 1 << ',' << walk.points[s] + 1 << ',' << to_string(instance.ticks_to_time(walk.ticks[s]))
        << '\n';
  }
}

}  // namespace bgt
