#include <gtest/gtest.h>

#include "ddsp/bundled.hpp"
#include "ddsp/instance_io.hpp"

using namespace ddsp;

namespace {

std::size_t line_of(const std::string& text, const std::string& needle, std::size_t from = 0) {
  std::size_t pos = text.find(needle, from);
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

void expect_same(const SpInstance& a, const SpInstance& b) {
  EXPECT_EQ(a.name, b.name);
  EXPECT_EQ(a.sense, b.sense);
  EXPECT_EQ(a.first.names, b.first.names);
  EXPECT_EQ(a.first.cost, b.first.cost);
  EXPECT_EQ(a.first.domains, b.first.domains);
  EXPECT_EQ(a.first.lower, b.first.lower);
  EXPECT_EQ(a.first.upper, b.first.upper);
  EXPECT_EQ(a.partition.kind, b.partition.kind);
  EXPECT_EQ(a.partition.forms, b.partition.forms);
  EXPECT_EQ(a.partition.choice, b.partition.choice);
  EXPECT_EQ(a.recourse.relations, b.recourse.relations);
  EXPECT_EQ(a.recourse.upper, b.recourse.upper);
  ASSERT_EQ(a.distributions.size(), b.distributions.size());
  for (std::size_t d = 0; d < a.distributions.size(); ++d) {
    const auto& x = a.distributions[d];
    const auto& y = b.distributions[d];
    EXPECT_EQ(x.id, y.id);
    ASSERT_EQ(x.scenarios.size(), y.scenarios.size());
    for (std::size_t s = 0; s < x.scenarios.size(); ++s) {
      EXPECT_EQ(x.scenarios[s].probability, y.scenarios[s].probability);
      EXPECT_EQ(x.scenarios[s].q, y.scenarios[s].q);
      EXPECT_TRUE(x.scenarios[s].W == y.scenarios[s].W);
      EXPECT_TRUE(x.scenarios[s].T == y.scenarios[s].T);
      EXPECT_EQ(x.scenarios[s].h, y.scenarios[s].h);
      EXPECT_EQ(x.scenarios[s].y_upper, y.scenarios[s].y_upper);
    }
  }
  EXPECT_EQ(a.bounds.u_opt, b.bounds.u_opt);
  EXPECT_EQ(a.bounds.mu_lower, b.bounds.mu_lower);
  EXPECT_EQ(a.uncertainty.convex_in_xi, b.uncertainty.convex_in_xi);
  EXPECT_EQ(a.uncertainty.monotone_h, b.uncertainty.monotone_h);
}

}  // namespace

TEST(InstanceIo, TwoCellRoundTrip) {
  SpInstance a = two_cell_instance();
  std::string text = dump_instance(a);
  SpInstance b = parse_instance(text);
  expect_same(a, b);
  EXPECT_EQ(dump_instance(b), text);
}

TEST(InstanceIo, SegmentedRoundTrip) {
  SpInstance a = segmented_binary_instance();
  SpInstance b = parse_instance(dump_instance(a));
  expect_same(a, b);
  EXPECT_EQ(b.partition.segments.size(), 3u);
}

TEST(InstanceIo, MaximizationCostsStayNativeOnDisk) {
  SpInstance a = two_cell_instance();
  a.sense = Sense::Maximize;
  std::string text = dump_instance(a);
  SpInstance b = parse_instance(text);
  expect_same(a, b);
  auto j = nlohmann::json::parse(text);
  EXPECT_EQ(j["firstStage"]["variables"][0]["cost"].get<double>(), -a.first.cost[0]);
}

TEST(InstanceIo, ProbabilitySumReportsLine) {
  std::string text = dump_instance(two_cell_instance());
  std::size_t at = text.find("0.7");
  ASSERT_NE(at, std::string::npos);
  text.replace(at, 3, "0.6");
  std::size_t expected = line_of(text, "\"scenarios\"");
  try {
    parse_instance(text);
    FAIL() << "accepted probabilities summing to 0.9";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SchemaViolation);
    EXPECT_NE(std::string(e.what()).find("line " + std::to_string(expected) + ":"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("0.9"), std::string::npos) << e.what();
  }
}

TEST(InstanceIo, SyntaxErrorReportsLine) {
  std::string text = "{\n  \"name\": \"x\",\n  \"sense\": \"min\"\n  \"firstStage\": {}\n}\n";
  try {
    parse_instance(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 4:"), std::string::npos) << e.what();
  }
}

TEST(InstanceIo, BadDomainReportsLine) {
  std::string text = dump_instance(two_cell_instance());
  std::size_t at = text.find("\"continuous\"");
  ASSERT_NE(at, std::string::npos);
  std::size_t expected = line_of(text, "\"continuous\"");
  text.replace(at, 12, "\"fractional\"");
  try {
    parse_instance(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::SchemaViolation);
    EXPECT_NE(std::string(e.what()).find("line " + std::to_string(expected) + ":"), std::string::npos) << e.what();
  }
}

TEST(InstanceIo, InfiniteBoundsAsStrings) {
  std::string text = dump_instance(two_cell_instance());
  SpInstance a = parse_instance(text);
  EXPECT_EQ(a.recourse.upper[0], kInf);
  EXPECT_NE(text.find("\"inf\""), std::string::npos);
}

TEST(InstanceIo, LocateLineFollowsPointer) {
  std::string text = "{\n\"a\": [\n  1,\n  {\"b\":\n 2}\n],\n\"c\": 3\n}";
  EXPECT_EQ(io::locate_line(text, "/a"), 2u);
  EXPECT_EQ(io::locate_line(text, "/a/0"), 3u);
  // the value, not its key
  EXPECT_EQ(io::locate_line(text, "/a/1/b"), 5u);
  EXPECT_EQ(io::locate_line(text, "/c"), 7u);
}
