#ifndef SBBA_IO_HPP_
#define SBBA_IO_HPP_

#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

#include "json.hpp"
#include "sbba/order.hpp"
#include "sbba/sdm.hpp"

namespace sbba::io {

using Json = nlohmann::ordered_json;
using Instance = std::variant<SingleMarketInstance, SdmInstance>;

/// Schema or validation failure, with the offending field path.
class InstanceParseError : public std::runtime_error {
 public:
  InstanceParseError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

namespace detail {

inline Money parse_value(const Json& j, const std::string& field) {
  if (j.is_number_integer()) return Money(j.get<std::int64_t>());
  if (j.is_string()) {
    try {
      return Money::parse(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw InstanceParseError(field, e.what());
    }
  }
  if (j.is_number_float())
    throw InstanceParseError(field, "floating-point literal; write non-integers as strings such as \"2.5\"");
  throw InstanceParseError(field, "expected an integer or a decimal string");
}

inline std::string parse_id(const Json& j, const std::string& field) {
  if (j.is_string() && !j.get<std::string>().empty()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<std::int64_t>());
  throw InstanceParseError(field, "expected a non-empty string id");
}

inline const Json& require(const Json& obj, const char* key, const std::string& field) {
  if (!obj.is_object()) throw InstanceParseError(field, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw InstanceParseError(field, std::string("missing field '") + key + "'");
  return *it;
}

inline Json value_json(const Money& m) {
  if (m.is_integer() && m.numerator() <= std::numeric_limits<std::int64_t>::max() &&
      m.numerator() >= std::numeric_limits<std::int64_t>::min())
    return m.numerator().convert_to<std::int64_t>();
  return m.to_string();
}

inline std::size_t line_of(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

}  // namespace detail

/// Parses and validates an instance document. Files with a "markets" list
/// are spatially distributed; others are single-market.
inline Instance parse_instance(const Json& doc) {
  if (!doc.is_object()) throw InstanceParseError("", "top level must be an object");
  const Json& traders = detail::require(doc, "traders", "");
  if (!traders.is_array()) throw InstanceParseError("traders", "expected an array");
  const bool spatial = doc.contains("markets");
  if (!spatial && doc.contains("transit")) throw InstanceParseError("transit", "given without a markets list");

  std::vector<Order> orders;
  for (std::size_t i = 0; i < traders.size(); ++i) {
    const std::string field = "traders[" + std::to_string(i) + "]";
    const Json& t = traders[i];
    Order o;
    o.id = detail::parse_id(detail::require(t, "id", field), field + ".id");
    const Json& side = detail::require(t, "side", field);
    if (side == "buy")
      o.side = Side::kBuy;
    else if (side == "sell")
      o.side = Side::kSell;
    else
      throw InstanceParseError(field + ".side", "expected \"buy\" or \"sell\"");
    o.value = detail::parse_value(detail::require(t, "value", field), field + ".value");
    if (spatial) {
      o.market = detail::parse_id(detail::require(t, "market", field), field + ".market");
    } else if (t.contains("market")) {
      throw InstanceParseError(field + ".market", "unknown market reference in a single-market file");
    }
    orders.push_back(std::move(o));
  }

  try {
    if (!spatial) {
      SingleMarketInstance inst;
      for (auto& o : orders) (o.side == Side::kBuy ? inst.buyers : inst.sellers).push_back(std::move(o));
      inst.validate();
      return inst;
    }
    SdmInstance sdm;
    const Json& markets = doc.at("markets");
    if (!markets.is_array()) throw InstanceParseError("markets", "expected an array");
    for (std::size_t i = 0; i < markets.size(); ++i) {
      const std::string field = "markets[" + std::to_string(i) + "]";
      sdm.markets.push_back(detail::parse_id(detail::require(markets[i], "id", field), field + ".id"));
    }
    if (doc.contains("transit")) {
      const Json& transit = doc.at("transit");
      if (!transit.is_array()) throw InstanceParseError("transit", "expected an array");
      for (std::size_t i = 0; i < transit.size(); ++i) {
        const std::string field = "transit[" + std::to_string(i) + "]";
        MarketPair pair{detail::parse_id(detail::require(transit[i], "from", field), field + ".from"),
                        detail::parse_id(detail::require(transit[i], "to", field), field + ".to")};
        Money cost = detail::parse_value(detail::require(transit[i], "cost", field), field + ".cost");
        if (cost <= Money(0))
          throw InstanceParseError(field + ".cost", "transit cost " + pair.first + "->" + pair.second +
                                                        " must be positive, got " + cost.to_string());
        if (!sdm.transit.emplace(pair, cost).second)
          throw InstanceParseError(field, "duplicate transit pair " + pair.first + "->" + pair.second);
      }
    }
    sdm.traders = std::move(orders);
    sdm.validate();
    return sdm;
  } catch (const ValidationError& e) {
    throw InstanceParseError("", e.what());
  }
}

inline Instance parse_instance_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InstanceParseError("line " + std::to_string(detail::line_of(text, e.byte)), e.what());
  }
  return parse_instance(doc);
}

inline Instance parse_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_instance_text(buffer.str());
}

inline Json order_json(const Order& o, bool with_market) {
  Json t;
  t["id"] = o.id;
  t["side"] = to_string(o.side);
  t["value"] = detail::value_json(o.value);
  if (with_market) t["market"] = o.market;
  return t;
}

inline Json to_json(const SingleMarketInstance& inst) {
  Json doc;
  doc["traders"] = Json::array();
  for (const auto& o : inst.buyers) doc["traders"].push_back(order_json(o, false));
  for (const auto& o : inst.sellers) doc["traders"].push_back(order_json(o, false));
  return doc;
}

inline Json to_json(const SdmInstance& sdm) {
  Json doc;
  doc["markets"] = Json::array();
  for (const auto& m : sdm.markets) doc["markets"].push_back(Json{{"id", m}});
  doc["transit"] = Json::array();
  for (const auto& [pair, cost] : sdm.transit)
    doc["transit"].push_back(Json{{"from", pair.first}, {"to", pair.second}, {"cost", detail::value_json(cost)}});
  doc["traders"] = Json::array();
  for (const auto& o : sdm.traders) doc["traders"].push_back(order_json(o, true));
  return doc;
}

inline Json to_json(const Instance& inst) {
  return std::visit([](const auto& i) { return to_json(i); }, inst);
}

inline std::string serialize(const Instance& inst) { return to_json(inst).dump(2) + "\n"; }

inline Json to_json(const OutcomeDistribution& dist) {
  Json out = Json::array();
  for (const auto& br : dist.branches()) {
    Json b;
    b["probability"] = br.probability.to_string();
    Json buyers = Json::object(), sellers = Json::object();
    for (const auto& [id, p] : br.outcome.buyer_fills) buyers[id] = p.to_string();
    for (const auto& [id, p] : br.outcome.seller_fills) sellers[id] = p.to_string();
    b["buyer_fills"] = buyers;
    b["seller_fills"] = sellers;
    if (!br.outcome.shipments.empty()) {
      Json ships = Json::array();
      for (const auto& s : br.outcome.shipments)
        ships.push_back(Json{{"from", s.from}, {"to", s.to}, {"units", s.units}, {"unit_cost", s.unit_cost.to_string()}});
      b["shipments"] = ships;
    }
    b["broker_surplus"] = br.outcome.broker_surplus().to_string();
    out.push_back(b);
  }
  return out;
}

}  // namespace sbba::io

#endif  // SBBA_IO_HPP_
