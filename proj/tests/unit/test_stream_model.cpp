// Copyright 2026 The scorewatch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "scorewatch/error.hpp"
#include "scorewatch/rng.hpp"
#include "scorewatch/stream_model.hpp"

namespace {

using namespace scorewatch;

FeatureSchema amount_channel() {
  return FeatureSchema({{"amount", FeatureKind::numeric}, {"channel", FeatureKind::categorical}});
}

std::vector<Event> read_all(const std::string& text, const FeatureSchema& schema,
                            StreamFormat format = StreamFormat::csv) {
  std::istringstream in(text);
  EventReader reader(in, schema, format);
  std::vector<Event> out;
  while (auto e = reader.next()) out.push_back(std::move(*e));
  return out;
}

StreamError::Kind error_kind(const std::string& text, std::size_t* line = nullptr) {
  try {
    read_all(text, amount_channel());
  } catch (const StreamError& e) {
    if (line) *line = e.line();
    return e.kind();
  }
  ADD_FAILURE() << "no error";
  return StreamError::Kind::empty;
}

TEST(Schema, ParsesJson) {
  auto s = FeatureSchema::from_json(nlohmann::json::parse(
      R"({"features":[{"name":"amount","kind":"numeric"},{"name":"channel","kind":"categorical"}]})"));
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[1].kind, FeatureKind::categorical);
  EXPECT_EQ(s.index_of("channel"), 1u);
  EXPECT_FALSE(s.index_of("nope"));
  EXPECT_EQ(FeatureSchema::from_json(s.to_json()).features().size(), 2u);
}

TEST(Schema, RejectsDuplicatesAndReservedNames) {
  EXPECT_THROW(FeatureSchema({{"a", FeatureKind::numeric}, {"a", FeatureKind::numeric}}), ConfigError);
  EXPECT_THROW(FeatureSchema({{"score", FeatureKind::numeric}}), ConfigError);
  EXPECT_THROW(FeatureSchema({{"timestamp", FeatureKind::numeric}}), ConfigError);
  EXPECT_THROW(FeatureSchema::from_json(nlohmann::json::parse(R"({"features":[{"name":"x","kind":"text"}]})")),
               ConfigError);
}

TEST(Reader, ParsesCsvRow) {
  auto events = read_all("timestamp,score,amount,channel\n1000,0.97,12.5,web\n", amount_channel());
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].timestamp, 1000);
  EXPECT_DOUBLE_EQ(events[0].score, 0.97);
  EXPECT_EQ(events[0].features[0], FeatureValue(12.5));
  EXPECT_EQ(events[0].features[1], FeatureValue(std::string("web")));
}

TEST(Reader, ScoreOutsideUnitIntervalIsRejected) {
  std::size_t line = 0;
  EXPECT_EQ(error_kind("timestamp,score,amount,channel\n1000,0.5,1,web\n1001,1.2,1,web\n", &line),
            StreamError::Kind::rejected);
  EXPECT_EQ(line, 3u);
  EXPECT_EQ(error_kind("timestamp,score,amount,channel\n1000,-0.01,1,web\n"), StreamError::Kind::rejected);
}

TEST(Reader, EmptyNumericCellIsMissing) {
  auto events = read_all("timestamp,score,amount,channel\n1000,0.5,,\n", amount_channel());
  EXPECT_TRUE(is_missing(events[0].features[0]));
  EXPECT_TRUE(is_missing(events[0].features[1]));
}

TEST(Reader, NonFiniteNumericIsMissing) {
  auto events = read_all("timestamp,score,amount,channel\n1000,0.5,nan,web\n1000,0.5,inf,web\n", amount_channel());
  EXPECT_TRUE(is_missing(events[0].features[0]));
  EXPECT_TRUE(is_missing(events[1].features[0]));
  EXPECT_TRUE(is_missing(numeric_value(std::numeric_limits<double>::infinity())));
}

TEST(Reader, DecreasingTimestampIsOrderingError) {
  std::size_t line = 0;
  EXPECT_EQ(error_kind("timestamp,score,amount,channel\n1000,0.5,1,web\n1000,0.5,1,web\n999,0.5,1,web\n", &line),
            StreamError::Kind::ordering);
  EXPECT_EQ(line, 4u);
}

TEST(Reader, MalformedRows) {
  EXPECT_EQ(error_kind("timestamp,score,amount,channel\n1000,0.5,1\n"), StreamError::Kind::malformed);
  EXPECT_EQ(error_kind("timestamp,score,amount,channel\nabc,0.5,1,web\n"), StreamError::Kind::malformed);
  EXPECT_EQ(error_kind("timestamp,score,amount,channel\n1000,x,1,web\n"), StreamError::Kind::malformed);
  EXPECT_EQ(error_kind("timestamp,score,amount,channel\n1000,0.5,12a,web\n"), StreamError::Kind::malformed);
  EXPECT_EQ(error_kind("timestamp,score,amount\n1000,0.5,1\n"), StreamError::Kind::malformed);
  EXPECT_EQ(error_kind("timestamp,score,amount,channel,other\n1000,0.5,1,web,2\n"), StreamError::Kind::malformed);
}

TEST(Reader, HeaderOrderAndExtras) {
  auto events = read_all("channel,extra.card,score,amount,timestamp\n\"pos,1\",c-9,0.25,3,7\n", amount_channel());
  ASSERT_EQ(events.size(), 1u);
  EXPECT_EQ(events[0].timestamp, 7);
  EXPECT_EQ(events[0].features[1], FeatureValue(std::string("pos,1")));
  EXPECT_EQ(events[0].extras.at("card"), "c-9");
}

TEST(Reader, JsonLines) {
  auto events = read_all(
      "{\"timestamp\":5,\"score\":0.1,\"amount\":2.5,\"channel\":\"web\",\"extra.email\":\"a@b\"}\n"
      "\n"
      "{\"timestamp\":6,\"score\":1,\"amount\":null}\n",
      amount_channel(), StreamFormat::jsonl);
  ASSERT_EQ(events.size(), 2u);
  EXPECT_EQ(events[0].extras.at("email"), "a@b");
  EXPECT_TRUE(is_missing(events[1].features[0]));
  EXPECT_TRUE(is_missing(events[1].features[1]));
  EXPECT_DOUBLE_EQ(events[1].score, 1.0);
}

TEST(Reader, JsonLinesErrors) {
  EXPECT_THROW(read_all("{\"timestamp\":5}\n", amount_channel(), StreamFormat::jsonl), StreamError);
  EXPECT_THROW(read_all("not json\n", amount_channel(), StreamFormat::jsonl), StreamError);
  EXPECT_THROW(read_all("{\"timestamp\":5,\"score\":2}\n", amount_channel(), StreamFormat::jsonl), StreamError);
}

TEST(Reader, SinglePass) {
  std::istringstream in("timestamp,score,amount,channel\n1,0.1,1,a\n2,0.2,2,b\n3,0.3,3,c\n");
  EventReader reader(in, amount_channel(), StreamFormat::csv);
  std::size_t n = 0;
  while (reader.next()) ++n;
  EXPECT_EQ(n, 3u);
  EXPECT_EQ(reader.events_read(), 3u);
  EXPECT_FALSE(reader.next());
}

TEST(Csv, SplitAndQuote) {
  EXPECT_EQ(split_csv_record("a,\"b,c\",\"d\"\"e\","), (std::vector<std::string>{"a", "b,c", "d\"e", ""}));
  EXPECT_EQ(quote_csv_field("plain"), "plain");
  EXPECT_EQ(quote_csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(quote_csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Csv, RoundTripRandomEvents) {
  const FeatureSchema schema = amount_channel();
  Rng rng(42);
  std::vector<Event> events;
  std::int64_t ts = 1'600'000'000'000;
  for (int i = 0; i < 500; ++i) {
    Event e;
    ts += static_cast<std::int64_t>(rng.below(3));
    e.timestamp = ts;
    e.score = rng.uniform();
    if (i % 7 == 0) e.score = i % 2 ? 1.0 : 0.0;
    e.features.push_back(i % 11 == 0 ? FeatureValue(Missing{}) : FeatureValue(rng.normal() * 1e3));
    const char* cats[] = {"web", "pos", "a,b", "quote\"d", ""};
    const std::string c = cats[rng.below(5)];
    e.features.push_back(c.empty() ? FeatureValue(Missing{}) : FeatureValue(c));
    e.extras["card"] = "c" + std::to_string(i);
    events.push_back(e);
  }
  std::string text = csv_header(schema, {"card"}) + "\n";
  for (const auto& e : events) text += to_csv_row(e, {"card"}) + "\n";
  const auto back = read_all(text, schema);
  ASSERT_EQ(back.size(), events.size());
  for (std::size_t i = 0; i < events.size(); ++i) EXPECT_EQ(back[i], events[i]) << i;
}

TEST(Csv, FormatDoubleRoundTrips) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.normal() * std::pow(10.0, static_cast<double>(rng.below(20)) - 10.0);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(Format, Parse) {
  EXPECT_EQ(parse_stream_format("csv"), StreamFormat::csv);
  EXPECT_EQ(parse_stream_format("jsonl"), StreamFormat::jsonl);
  EXPECT_FALSE(parse_stream_format("xml"));
}

}  // namespace
