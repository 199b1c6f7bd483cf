#include "tacsum/io.hpp"
#include "tacsum/sampler.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

namespace tacsum {
namespace {

EmbeddingSet random_embeddings(std::mt19937_64& rng) {
  EmbeddingSet e;
  e.meta = {1 + rng() % 5000, 10.0 + static_cast<double>(rng() % 50)};
  e.map = sample_indices(e.meta, 4.0);
  const auto dim = static_cast<Eigen::Index>(1 + rng() % 16);
  e.data.resize(static_cast<Eigen::Index>(e.map.size()), dim);
  std::normal_distribution<float> normal;
  for (Eigen::Index i = 0; i < e.data.rows(); ++i)
    for (Eigen::Index j = 0; j < dim; ++j) e.data(i, j) = normal(rng);  // float-representable
  return e;
}

std::string bytes_of(const EmbeddingSet& e) {
  std::ostringstream out(std::ios::binary);
  write_tacemb(out, e);
  return out.str();
}

EmbeddingSet parse(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return read_tacemb(in);
}

TEST(Tacemb, ExactByteLayout) {
  EmbeddingSet e;
  e.meta = {3, 30.0};
  e.map = {{1}, 4.0};
  e.data = Matrix::Constant(1, 2, 1.0);
  const std::string b = bytes_of(e);
  const std::string expected = std::string("TACE") +
                               std::string("\x01\x00\x00\x00", 4) +          // version
                               std::string("\x01\x00\x00\x00", 4) +          // samples
                               std::string("\x02\x00\x00\x00", 4) +          // dim
                               std::string("\x03\x00\x00\x00\x00\x00\x00\x00", 8) +  // total frames
                               std::string("\x00\x00\xf0\x41", 4) +          // 30.0f
                               std::string("\x00\x00\x80\x40", 4) +          // 4.0f
                               std::string("\x00\x00\x80\x3f\x00\x00\x80\x3f", 8) +  // two 1.0f
                               std::string("\x01\x00\x00\x00", 4);           // index 1
  EXPECT_EQ(b, expected);
}

TEST(Tacemb, RoundTripProperty) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const auto e = random_embeddings(rng);
    const auto back = parse(bytes_of(e));
    ASSERT_EQ(back.meta.total_frames, e.meta.total_frames);
    ASSERT_EQ(back.meta.fps, e.meta.fps);
    ASSERT_EQ(back.map.rate, e.map.rate);
    ASSERT_EQ(back.map.sample_indices, e.map.sample_indices);
    ASSERT_EQ(back.data, e.data);
  }
}

TEST(Tacemb, RejectsCorruptInput) {
  std::mt19937_64 rng(1);
  const std::string good = bytes_of(random_embeddings(rng));

  auto expect_error = [](const std::string& bytes, const std::string& what) {
    try {
      parse(bytes);
      ADD_FAILURE() << "expected " << what;
    } catch (const FormatError& e) {
      EXPECT_NE(std::string(e.what()).find(what), std::string::npos) << e.what();
    }
  };
  std::string bad = good;
  bad[0] = 'X';
  expect_error(bad, "bad magic");
  bad = good;
  bad[4] = 2;
  expect_error(bad, "unsupported version");
  expect_error(good.substr(0, good.size() - 1), "truncated");
  expect_error(good + "x", "trailing");

  // indices out of order
  EmbeddingSet e;
  e.meta = {10, 30.0};
  e.map = {{1, 5}, 4.0};
  e.data = Matrix::Zero(2, 1);
  bad = bytes_of(e);
  bad[bad.size() - 4] = 0;  // second index becomes 0
  expect_error(bad, "strictly increasing");
}

TEST(AnnotationJson, RoundTripAndSchema) {
  AnnotatedVideo v;
  v.video_id = "Air_Force_One";
  v.meta = {10, 25.0};
  v.change_points = {{0, 4}, {4, 10}};
  v.user_summaries = {{0, 0, 1, 1, 1, 0, 0, 0, 0, 0}, {1, 1, 0, 0, 0, 0, 0, 0, 1, 1}};
  v.gt_scores = std::vector<double>(10, 0.25);
  const auto j = to_json(v);
  EXPECT_EQ(j.at("n_frames"), 10);
  EXPECT_EQ(j.at("change_points")[1], nlohmann::json::array({4, 10}));
  EXPECT_EQ(annotation_from_json(j), v);

  auto without = v;
  without.gt_scores.reset();
  EXPECT_FALSE(to_json(without).contains("gt_scores"));
  EXPECT_EQ(annotation_from_json(to_json(without)), without);
}

TEST(AnnotationJson, RejectsInvalid) {
  auto j = nlohmann::json::parse(R"({"video_id":"a","n_frames":4,"fps":30,
      "change_points":[[0,2],[2,4]],"user_summaries":[[0,1,1,0]]})");
  EXPECT_NO_THROW(annotation_from_json(j));
  auto bad = j;
  bad["user_summaries"][0].push_back(1);
  EXPECT_THROW(annotation_from_json(bad), FormatError);
  bad = j;
  bad.erase("fps");
  EXPECT_THROW(annotation_from_json(bad), FormatError);
  bad = j;
  bad["change_points"][1] = nlohmann::json::array({3, 4});
  EXPECT_THROW(annotation_from_json(bad), FormatError);
}

TEST(ConfigJson, RoundTripProperty) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    PipelineConfig c;
    c.rate = 1 + static_cast<double>(rng() % 8);
    c.window = 1 + 2 * static_cast<int>(rng() % 5);
    c.keyframe_rule = static_cast<KeyframeRule>(rng() % 4);
    c.interp = static_cast<Interpolation>(rng() % 2);
    c.bias_mode = static_cast<BiasMode>(rng() % 2);
    c.aggregation = static_cast<UserAggregation>(rng() % 2);
    c.bias = static_cast<double>(rng() % 1000) / 1000.0;
    c.seed = rng();
    c.temporal = rng() % 2;
    const nlohmann::json j = c;
    ASSERT_EQ(j.get<PipelineConfig>(), c);
  }
  EXPECT_EQ(nlohmann::json(PipelineConfig{}).at("keyframe_rule"), "middle+ends");
}

TEST(SummaryJson, RoundTripProperty) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  for (int trial = 0; trial < 100; ++trial) {
    SummaryResult s;
    std::size_t at = 0;
    for (int p = 0; p < 1 + static_cast<int>(rng() % 6); ++p) {
      const std::size_t len = 1 + rng() % 9;
      s.partitions.parts.push_back({at, at + len, p});
      s.keyframes.push_back(at);
      at += len;
    }
    s.sample_scores.resize(at);
    for (auto& v : s.sample_scores) v = u(rng);
    s.frame_scores.resize(at * 3);
    for (auto& v : s.frame_scores) v = u(rng);
    s.selected_segments = {0, 2};
    ASSERT_NO_THROW(check(s));
    ASSERT_EQ(summary_from_json(nlohmann::json::parse(to_json(s).dump())), s);
  }
}

}  // namespace
}  // namespace tacsum
