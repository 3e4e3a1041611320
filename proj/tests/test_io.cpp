#include <gtest/gtest.h>

#include "sbba/generate.hpp"
#include "sbba/io.hpp"

namespace sbba {
namespace {

constexpr const char* kMainExample = R"({
  "markets": [{"id": "1"}, {"id": "2"}],
  "transit": [{"from": "1", "to": "2", "cost": 4}, {"from": "2", "to": "1", "cost": 4}],
  "traders": [
    {"id": "m1-s1", "side": "sell", "value": 1, "market": "1"},
    {"id": "m1-s5", "side": "sell", "value": 5, "market": "1"},
    {"id": "m1-s9", "side": "sell", "value": 9, "market": "1"},
    {"id": "m1-s13", "side": "sell", "value": 13, "market": "1"},
    {"id": "m1-s19", "side": "sell", "value": 19, "market": "1"},
    {"id": "m1-b20", "side": "buy", "value": 20, "market": "1"},
    {"id": "m1-b18", "side": "buy", "value": 18, "market": "1"},
    {"id": "m1-b12", "side": "buy", "value": 12, "market": "1"},
    {"id": "m1-b8", "side": "buy", "value": 8, "market": "1"},
    {"id": "m1-b4", "side": "buy", "value": 4, "market": "1"},
    {"id": "m2-s2", "side": "sell", "value": 2, "market": "2"},
    {"id": "m2-s19", "side": "sell", "value": 19, "market": "2"},
    {"id": "m2-s21", "side": "sell", "value": 21, "market": "2"},
    {"id": "m2-s27", "side": "sell", "value": 27, "market": "2"},
    {"id": "m2-s31", "side": "sell", "value": 31, "market": "2"},
    {"id": "m2-b36", "side": "buy", "value": 36, "market": "2"},
    {"id": "m2-b32", "side": "buy", "value": 32, "market": "2"},
    {"id": "m2-b28", "side": "buy", "value": 28, "market": "2"},
    {"id": "m2-b23", "side": "buy", "value": 23, "market": "2"},
    {"id": "m2-b18", "side": "buy", "value": 18, "market": "2"}
  ]
})";

std::string error_of(const std::string& text) {
  try {
    io::parse_instance_text(text);
  } catch (const io::InstanceParseError& e) {
    return e.what();
  }
  return "";
}

TEST(ParseInstance, MainExample) {
  const auto inst = io::parse_instance_text(kMainExample);
  ASSERT_TRUE(std::holds_alternative<SdmInstance>(inst));
  const auto& sdm = std::get<SdmInstance>(inst);
  EXPECT_EQ(sdm.traders.size(), 20u);
  EXPECT_EQ(sdm.transit_cost("1", "2"), Money(4));
  auto expected = generate::sdm_main_example();
  auto by_id = [](std::vector<Order> v) {
    std::sort(v.begin(), v.end(), [](const Order& a, const Order& b) { return a.id < b.id; });
    return v;
  };
  EXPECT_EQ(by_id(sdm.traders), by_id(expected.traders));
}

TEST(ParseInstance, SingleMarketWithDecimals) {
  const auto inst = io::parse_instance_text(
      R"({"traders": [{"id": "a", "side": "buy", "value": "2.5"}, {"id": "b", "side": "sell", "value": "1/3"}]})");
  const auto& sm = std::get<SingleMarketInstance>(inst);
  EXPECT_EQ(sm.buyers.at(0).value, Money(5, 2));
  EXPECT_EQ(sm.sellers.at(0).value, Money(1, 3));
}

TEST(ParseInstance, EmptyTraderList) {
  const auto inst = io::parse_instance_text(R"({"traders": []})");
  const auto& sm = std::get<SingleMarketInstance>(inst);
  EXPECT_TRUE(sm.buyers.empty());
  EXPECT_TRUE(sm.sellers.empty());
}

TEST(ParseInstance, ZeroTransitNamesThePair) {
  const auto msg = error_of(R"({"markets": [{"id": "x"}, {"id": "y"}],
    "transit": [{"from": "x", "to": "y", "cost": 0}, {"from": "y", "to": "x", "cost": 1}], "traders": []})");
  EXPECT_NE(msg.find("x->y"), std::string::npos) << msg;
  EXPECT_NE(msg.find("transit[0].cost"), std::string::npos) << msg;
}

TEST(ParseInstance, Rejections) {
  EXPECT_NE(error_of(R"({"traders": [{"id": "a", "side": "buy", "value": 1}, {"id": "a", "side": "sell", "value": 1}]})")
                .find("duplicate"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"traders": [{"id": "a", "side": "bid", "value": 1}]})").find("traders[0].side"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"traders": [{"id": "a", "side": "buy", "value": 1.5}]})").find("traders[0].value"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"traders": [{"id": "a", "side": "buy"}]})").find("missing field 'value'"), std::string::npos);
  EXPECT_NE(error_of(R"({"markets": [{"id": "1"}], "traders": [{"id": "a", "side": "buy", "value": 1, "market": "9"}]})")
                .find("unknown market"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"traders": [{"id": "a", "side": "buy", "value": 1, "market": "9"}]})").find("market"),
            std::string::npos);
  EXPECT_NE(error_of("{\n\"traders\": [\n,]}").find("line 3"), std::string::npos);
}

// serialize then parse gives back the same instance.
TEST(Serialize, RoundTripProperty) {
  generate::Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    io::Instance single =
        generate::random_single_market(rng, generate::uniform(rng, 1, 6), generate::uniform(rng, 1, 6), {0, 50});
    EXPECT_EQ(io::parse_instance_text(io::serialize(single)), single);
    generate::SdmSpec spec;
    spec.markets = static_cast<std::size_t>(generate::uniform(rng, 1, 3));
    io::Instance sdm = generate::random_sdm(rng, spec);
    EXPECT_EQ(io::parse_instance_text(io::serialize(sdm)), sdm);
  }
  SingleMarketInstance frac;
  frac.buyers = {buyer("x", Money(7, 3))};
  io::Instance wrapped = frac;
  EXPECT_EQ(io::parse_instance_text(io::serialize(wrapped)), wrapped);
}

}  // namespace
}  // namespace sbba
