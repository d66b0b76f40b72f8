#include "support.hpp"

using namespace magkit;

TEST(CsvInput, ParsesSymmetricMatrix) {
  const MetricSpace x = parse_space("# comment\n0,2,100\n2, 0 ,100\n\n100,100,0\n");
  EXPECT_EQ(x.size(), 3u);
  EXPECT_EQ(x.distance(0, 1), 2.0);
  EXPECT_EQ(x.distance(2, 1), 100.0);
}

TEST(CsvInput, Diagnostics) {
  EXPECT_MAGKIT_ERROR(parse_distance_csv("0,1\n1,zero\n"), ErrorCode::ParseError);
  EXPECT_MAGKIT_ERROR(parse_distance_csv("0,1\n1\n"), ErrorCode::NotSquare);
  EXPECT_MAGKIT_ERROR(parse_distance_csv("0,nan\nnan,0\n"), ErrorCode::NonFinite);
  EXPECT_MAGKIT_ERROR(parse_distance_csv("0,inf\ninf,0\n"), ErrorCode::NonFinite);
  EXPECT_MAGKIT_ERROR(parse_distance_csv("0,1,\n1,0,\n"), ErrorCode::ParseError);
  EXPECT_MAGKIT_ERROR(parse_distance_csv("0,1x\n1,0\n"), ErrorCode::ParseError);
  EXPECT_MAGKIT_ERROR(parse_distance_csv(""), ErrorCode::EmptyInput);
  EXPECT_MAGKIT_ERROR(parse_space("0,1\n2,0\n"), ErrorCode::AsymmetricInput);
}

TEST(JsonInput, PointsAndDistances) {
  const MetricSpace p = parse_space(R"({"points": [[0, 0], [3, 0], [0, 4]]})");
  EXPECT_DOUBLE_EQ(p.distance(1, 2), 5.0);
  const MetricSpace d = parse_space(R"({"dist": [[0, 1], [1, 0]], "labels": ["a", "b"]})");
  EXPECT_EQ(d.distance(0, 1), 1.0);
  EXPECT_EQ(d.labels()[0], "a");
  const MetricSpace l = parse_space(R"({"points": [[0], [1]], "labels": ["u", "v"]})");
  EXPECT_EQ(l.labels()[1], "v");
}

TEST(JsonInput, Diagnostics) {
  EXPECT_MAGKIT_ERROR(parse_space(R"({"points": [[0, NaN], [1, 0]]})"), ErrorCode::ParseError);
  EXPECT_MAGKIT_ERROR(parse_space(R"({"points": [[0, 1e999], [1, 0]]})"), ErrorCode::ParseError);
  EXPECT_MAGKIT_ERROR(parse_space(R"({"points": [[0, "a"], [1, 0]]})"), ErrorCode::ParseError);
  EXPECT_MAGKIT_ERROR(parse_space(R"({"dist": [[0, 1], [1]]})"), ErrorCode::NotSquare);
  EXPECT_MAGKIT_ERROR(parse_space(R"({"other": 1})"), ErrorCode::ParseError);
  EXPECT_MAGKIT_ERROR(parse_space(R"({"points": [[0, 0], [0, 0]]})"), ErrorCode::DuplicatePoint);
  EXPECT_MAGKIT_ERROR(parse_space("{broken"), ErrorCode::ParseError);
}

TEST(JsonOutput, FullPrecisionRoundTrip) {
  const double v = 2.0945945945945947;
  const Json j = to_json(Vector(Vector::Constant(1, v)));
  EXPECT_EQ(Json::parse(j.dump())[0].get<double>(), v);
  EXPECT_EQ(format_double(v), "2.0945945945945947");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(JsonOutput, EmbeddingExport) {
  const Json j = to_json(similarity_embedding(support::small_example()));
  ASSERT_EQ(j["points"].size(), 3u);
  EXPECT_EQ(j["points"][0].size(), 2u);
  EXPECT_TRUE(j.contains("circumradius"));
  EXPECT_EQ(j["circumcenter_barycentric"].size(), 3u);
}

TEST(JsonOutput, SetFunctionReportShape) {
  const SetFunctionReport r = check_shifted_submodularity(support::discrete(4, 5.0), 1.0, -1.0);
  const Json j = to_json(r, 1);
  EXPECT_EQ(j["kind"], "shifted");
  EXPECT_EQ(j["alpha"], -1.0);
  EXPECT_TRUE(j["violations"].is_array());
  EXPECT_TRUE(j["monotonicity_violations"].is_array());
  EXPECT_TRUE(j["summary"]["strictly_submodular"].get<bool>());
  EXPECT_EQ(j["F_values"].size(), r.f_values.size());
  EXPECT_EQ(j["G_values"][0]["Y"][0], 1);
  const Json inv = to_json(check_inverse_submodularity(support::discrete(3, 5.0), -1.4));
  EXPECT_EQ(inv["kind"], "inverse");
  EXPECT_FALSE(inv.contains("F_values"));
  EXPECT_EQ(inv["violations"][0]["Y"].size(), 2u);
}

TEST(JsonOutput, ResidualReport) {
  const Json j = to_json(identity_residuals(support::small_example()));
  EXPECT_TRUE(j["all_pass"].get<bool>());
  EXPECT_EQ(j["entries"].size(), 16u);
}
