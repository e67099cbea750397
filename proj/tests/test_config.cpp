#include <adagraph.hpp>

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace adagraph;

TEST(Config, Presets) {
  RunConfig c;
  apply_preset(c, "pu");
  EXPECT_EQ(c.n_superpixels, 800);
  EXPECT_DOUBLE_EQ(c.train.gamma, 0.5);
  EXPECT_EQ(c.train.t_layers, 5);
  EXPECT_EQ(c.train.iterations, 50);
  EXPECT_DOUBLE_EQ(c.train.learning_rate, 5e-4);
  EXPECT_DOUBLE_EQ(c.train.eta, 0.05);
  apply_preset(c, "salinas");
  EXPECT_EQ(c.n_superpixels, 580);
  EXPECT_DOUBLE_EQ(c.train.gamma, 0.3);
  apply_preset(c, "trento");
  EXPECT_EQ(c.n_superpixels, 550);
  try {
    apply_preset(c, "indian-pines");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigInvalid);
  }
}

TEST(Config, ParsesKeyValueText) {
  RunConfig c;
  std::istringstream in(
      "# comment line\n"
      "\n"
      "iterations = 7   # trailing comment\n"
      "gamma=0.25\n"
      "  normalize-embeddings = false\n"
      "cube = scene.raw\n");
  apply_config_text(c, in);
  EXPECT_EQ(c.train.iterations, 7);
  EXPECT_DOUBLE_EQ(c.train.gamma, 0.25);
  EXPECT_FALSE(c.train.normalize_embeddings);
  EXPECT_EQ(c.cube, "scene.raw");
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  const char* bad[] = {"nope = 1\n", "iterations = 3.5\n", "gamma = abc\n", "rescale = maybe\n", "just text\n"};
  for (const char* text : bad) {
    RunConfig c;
    std::istringstream in(text);
    try {
      apply_config_text(c, in);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ConfigInvalid) << text;
    }
  }
}

TEST(Config, MissingFileIsIoError) {
  RunConfig c;
  try {
    apply_config_file(c, "/nonexistent/adagraph.cfg");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}

TEST(Config, TextRoundTrips) {
  RunConfig a;
  apply_preset(a, "trento");
  a.train.learning_rate = 0.0123456789;
  a.train.seed = 99;
  a.dump_embedding = true;
  a.outdir = "somewhere";
  const std::string text = config_text(a);
  RunConfig b;
  std::istringstream in(text);
  apply_config_text(b, in);
  EXPECT_EQ(config_text(b), text);
  EXPECT_DOUBLE_EQ(b.train.learning_rate, 0.0123456789);
  EXPECT_EQ(b.outdir, "somewhere");
}

TEST(Config, EveryFieldIsListedOnce) {
  std::set<std::string> keys;
  for (const auto& f : config_fields()) EXPECT_TRUE(keys.insert(f.key).second) << f.key;
  EXPECT_TRUE(keys.count("compactness"));
  EXPECT_TRUE(keys.count("ablate-v3"));
}
