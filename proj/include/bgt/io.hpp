#ifndef BGT_IO_HPP
#define BGT_IO_HPP

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bgt/continuous.hpp"
#include "bgt/core.hpp"

namespace bgt {

using Json = nlohmann::ordered_json;

/// Malformed input file or field; the message names the field.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Instance {
  RateVector rates;
  std::optional<MetricInstance> metric;  // present when "travel" is given
  std::size_t start = 0;                 // 0-based
};

/// "num/den" (or "num" for integers).
Json rational_json(const Rational& value);
Rational rational_from_json(const Json& value, const std::string& field);

Instance instance_from_json(const Json& doc);
Json instance_to_json(const RateVector& rates);
Json instance_to_json(const MetricInstance& instance);

Json schedule_to_json(const CyclicSchedule& schedule);
CyclicSchedule schedule_from_json(const Json& doc, std::size_t n);

Json report_to_json(const SimulationReport& report);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// CSV rows "step,point,time" with 1-based points and exact times.
void write_walk_csv(std::ostream& out, const MetricInstance& instance, const TickWalk& walk);

}  // namespace bgt

#endif  // BGT_IO_HPP
