// Copyright (c) 2026 The ATS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ats/training.h"

#include <filesystem>

#include "ats/array_file.h"
#include "ats/checkpoint.h"
#include "ats/errors.h"
#include "ats/model.h"
#include "test_util.h"

namespace ats {
namespace {

using testing::RandomMatrix;
using testing::SmallConfig;
using testing::TempDir;

class TrainingTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    corpus_ = new std::vector<UtteranceSample>(
        GenerateSyntheticCorpus(2, 4, 42, SmallConfig()));
  }
  static void TearDownTestSuite() {
    delete corpus_;
    corpus_ = nullptr;
  }
  static TrainConfig ShortRun(int64_t steps) {
    TrainConfig t;
    t.max_steps = steps;
    t.checkpoint_every = 5;
    t.learning_rate = 1e-3;
    return t;
  }
  static std::vector<UtteranceSample>* corpus_;
};

std::vector<UtteranceSample>* TrainingTest::corpus_ = nullptr;

TEST(LossTest, L1HandValues) {
  Eigen::MatrixXd pred(1, 2);
  pred << 1.0, 2.0;
  EXPECT_EQ(L1Loss(pred, Eigen::MatrixXd::Zero(1, 2)), 1.5);
  EXPECT_EQ(L1Loss(pred, pred), 0.0);
  EXPECT_THROW(L1Loss(pred, Eigen::MatrixXd::Zero(2, 1)), std::invalid_argument);
}

TEST(LossTest, L1MatchesLoopOracle) {
  const Eigen::MatrixXd a = RandomMatrix(200, 40, 1, 3.0);
  const Eigen::MatrixXd b = RandomMatrix(200, 40, 2, 3.0);
  double sum = 0.0;
  for (int i = 0; i < 200; ++i) {
    for (int j = 0; j < 40; ++j) sum += std::abs(a(i, j) - b(i, j));
  }
  EXPECT_NEAR(L1Loss(a, b), sum / 8000.0, 1e-12);
}

TEST(LossTest, L1IsSymmetricAndSatisfiesTriangleInequality) {
  const Eigen::MatrixXd a = RandomMatrix(20, 7, 3);
  const Eigen::MatrixXd b = RandomMatrix(20, 7, 4);
  const Eigen::MatrixXd c = RandomMatrix(20, 7, 5);
  EXPECT_EQ(L1Loss(a, b), L1Loss(b, a));
  EXPECT_LE(L1Loss(a, c), L1Loss(a, b) + L1Loss(b, c) + 1e-15);
}

TEST(LossTest, CompositionWithDefaultWeights) {
  const LossBreakdown l = ComposeLoss(1.0, 2.0, 3.0, ModelConfig{});
  EXPECT_NEAR(l.l_total, 1.3, 1e-12);
  EXPECT_EQ(l.l_mel, 1.0);
  EXPECT_EQ(l.l_pitch, 2.0);
  EXPECT_EQ(l.l_energy, 3.0);
}

TEST(LossTest, DegenerateWeightsGiveMelLoss) {
  ModelConfig cfg;
  cfg.lambda_mel = 1.0;
  cfg.lambda_pitch = 0.0;
  cfg.lambda_energy = 0.0;
  const Eigen::MatrixXd mp = RandomMatrix(10, 40, 6), mt = RandomMatrix(10, 40, 7);
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(10, 50.0);
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(10);
  const LossBreakdown l = TotalLoss(mp, mt, p, z, p, z, cfg);
  EXPECT_EQ(l.l_total, l.l_mel);
  EXPECT_EQ(l.l_pitch, 50.0);
}

TEST(LossTest, IdentityIsZeroAndMismatchIsNamed) {
  const ModelConfig cfg;
  const Eigen::MatrixXd m = RandomMatrix(10, 40, 8);
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(10, 0.0, 1.0);
  EXPECT_EQ(TotalLoss(m, m, v, v, v, v, cfg).l_total, 0.0);
  try {
    TotalLoss(m, m, v, Eigen::VectorXd::Zero(9), v, v, cfg);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("pitch"), std::string::npos);
  }
}

TEST(OptimizerTest, ClippingBoundsGlobalNorm) {
  GradientMap g;
  g["a"] = RandomMatrix(4, 5, 9, 10.0);
  g["b"] = RandomMatrix(1, 3, 10, 10.0);
  const double before = GlobalNorm(g);
  EXPECT_EQ(ClipGradients(g, 1.0), before);
  EXPECT_LE(GlobalNorm(g), 1.0 + 1e-9);
  GradientMap small;
  small["a"] = Eigen::MatrixXd::Constant(1, 1, 0.25);
  ClipGradients(small, 1.0);
  EXPECT_EQ(small["a"](0, 0), 0.25);
}

TEST(OptimizerTest, FirstAdamStepIsSignedLearningRate) {
  ParameterStore params;
  params.Add("w", {3}, {1.0, -2.0, 0.5});
  GradientMap g;
  g["w"] = Eigen::RowVector3d(0.3, -4.0, 0.0);
  AdamState state;
  TrainConfig t;
  t.learning_rate = 0.01;
  AdamUpdate(params, g, state, t);
  const std::vector<double>& w = params.Get("w").data;
  EXPECT_NEAR(w[0], 1.0 - 0.01 * 0.3 / (0.3 + 1e-8), 1e-15);
  EXPECT_NEAR(w[1], -2.0 + 0.01 * 4.0 / (4.0 + 1e-8), 1e-15);
  EXPECT_EQ(w[2], 0.5);
  EXPECT_EQ(state.step, 1);
}

TEST(OptimizerTest, EpochOrderIsADeterministicPermutation) {
  std::vector<size_t> a = EpochOrder(10, 3, 2);
  EXPECT_EQ(a, EpochOrder(10, 3, 2));
  EXPECT_NE(a, EpochOrder(10, 3, 3));
  std::sort(a.begin(), a.end());
  for (size_t i = 0; i < 10; ++i) EXPECT_EQ(a[i], i);
}

TEST_F(TrainingTest, ZeroLearningRateLeavesParametersUnchanged) {
  const ModelConfig cfg = SmallConfig();
  ParameterStore params = InitParameters(cfg);
  const ParameterStore before = params;
  AdamState state;
  TrainConfig t;
  t.learning_rate = 0.0;
  const LossBreakdown l = TrainStep(params, state, (*corpus_)[0], cfg, t);
  EXPECT_TRUE(std::isfinite(l.l_total));
  EXPECT_GT(l.l_total, 0.0);
  EXPECT_TRUE(params == before);
}

TEST_F(TrainingTest, GradientsCoverEveryTrainingParameter) {
  const ModelConfig cfg = SmallConfig();
  const ParameterStore params = InitParameters(cfg);
  const LossAndGradients lg = ComputeLossAndGradients(params, (*corpus_)[1], cfg);
  EXPECT_EQ(lg.gradients.size(), params.size());
  for (const auto& [name, grad] : lg.gradients) {
    EXPECT_TRUE(grad.allFinite()) << name;
  }
}

TEST_F(TrainingTest, NonFiniteLossRaisesDivergence) {
  const ModelConfig cfg = SmallConfig();
  ParameterStore params = InitParameters(cfg);
  const ParameterStore before = params;
  UtteranceSample bad = (*corpus_)[0];
  bad.mel.frames(0, 0) = std::numeric_limits<double>::quiet_NaN();
  AdamState state;
  try {
    TrainStep(params, state, bad, cfg, TrainConfig{});
    FAIL();
  } catch (const DivergenceError& e) {
    EXPECT_EQ(e.step(), 1);
  }
  EXPECT_TRUE(params == before);
  EXPECT_EQ(state.step, 0);
}

TEST_F(TrainingTest, RunsAreDeterministic) {
  const ModelConfig cfg = SmallConfig();
  const TrainResult a = TrainLoop(*corpus_, InitParameters(cfg), cfg, ShortRun(6));
  const TrainResult b = TrainLoop(*corpus_, InitParameters(cfg), cfg, ShortRun(6));
  ASSERT_EQ(a.history.size(), 6u);
  for (size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].step, static_cast<int64_t>(i + 1));
    EXPECT_EQ(a.history[i].loss.l_total, b.history[i].loss.l_total);
  }
  EXPECT_TRUE(a.params == b.params);
}

TEST_F(TrainingTest, CheckpointCountAndExactResume) {
  TempDir dir("train");
  const ModelConfig cfg = SmallConfig();
  TrainLoopOptions opts;
  opts.checkpoint_dir = dir.path() / "full";
  const TrainResult full = TrainLoop(*corpus_, InitParameters(cfg), cfg, ShortRun(10), opts);
  EXPECT_EQ(full.history.size(), 10u);
  ASSERT_EQ(full.checkpoints.size(), 2u);
  EXPECT_EQ(full.checkpoints[0].filename(), "ckpt_step5.ckpt");
  EXPECT_EQ(full.checkpoints[1].filename(), "ckpt_step10.ckpt");
  EXPECT_TRUE(std::filesystem::exists(full.final_checkpoint));
  int files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(opts.checkpoint_dir)) {
    files += entry.path().extension() == ".ckpt" ? 1 : 0;
  }
  EXPECT_EQ(files, 3);

  TrainLoopOptions resume;
  resume.resume_from = full.checkpoints[0];
  const TrainResult tail =
      TrainLoop(*corpus_, InitParameters(cfg), cfg, ShortRun(10), resume);
  ASSERT_EQ(tail.history.size(), 5u);
  for (size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(tail.history[i].step, full.history[i + 5].step);
    EXPECT_EQ(tail.history[i].loss.l_total, full.history[i + 5].loss.l_total);
  }
  EXPECT_TRUE(tail.params == full.params);
}

TEST_F(TrainingTest, BatchedStepAveragesSamples) {
  const ModelConfig cfg = SmallConfig();
  const ParameterStore params = InitParameters(cfg);
  ParameterStore work = params;
  AdamState state;
  TrainConfig t;
  t.learning_rate = 0.0;
  const UtteranceSample* batch[] = {&(*corpus_)[0], &(*corpus_)[1]};
  const LossBreakdown mean = TrainStep(work, state, batch, cfg, t);
  const double l0 = ComputeLossAndGradients(params, (*corpus_)[0], cfg).loss.l_total;
  const double l1 = ComputeLossAndGradients(params, (*corpus_)[1], cfg).loss.l_total;
  EXPECT_NEAR(mean.l_total, 0.5 * (l0 + l1), 1e-12);
}

TEST(LossHistoryTest, CsvHasOneRowPerStep) {
  std::vector<LossRecord> h = {{1, {1.0, 2.0, 3.0, 1.3}}, {2, {0.5, 1.0, 1.0, 0.6}}};
  const std::string csv = LossHistoryCsv(h);
  EXPECT_EQ(csv.rfind("step,l_mel,l_pitch,l_energy,l_total\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
  EXPECT_NE(csv.find("\n2,0.5,1,1,"), std::string::npos);
}

TEST(CheckpointTest, RoundTripAndMissingFile) {
  TempDir dir("ckpt");
  const ModelConfig cfg = SmallConfig();
  Checkpoint ckpt{cfg, TrainConfig{}, InitParameters(cfg), AdamState{}};
  ckpt.optimizer.step = 7;
  ckpt.optimizer.m["style.input.bias"] = RandomMatrix(1, cfg.d_style, 1);
  ckpt.optimizer.v["style.input.bias"] = RandomMatrix(1, cfg.d_style, 2).cwiseAbs();
  SaveCheckpoint(dir.path() / "a.ckpt", ckpt);
  const Checkpoint back = LoadCheckpoint(dir.path() / "a.ckpt");
  EXPECT_TRUE(back.params == ckpt.params);
  EXPECT_EQ(back.optimizer.step, 7);
  EXPECT_EQ(back.optimizer.m.at("style.input.bias"), ckpt.optimizer.m.at("style.input.bias"));
  EXPECT_EQ(back.model_config.d_hidden, cfg.d_hidden);
  try {
    LoadCheckpoint(dir.path() / "none.ckpt");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_EQ(e.code(), DataErrorCode::kMissingFile);
  }
}

TEST(TrainConfigTest, Validation) {
  TrainConfig t;
  t.learning_rate = 0.0;
  EXPECT_NO_THROW(t.Validate());
  t.learning_rate = -1.0;
  EXPECT_THROW(t.Validate(), ConfigError);
  t = TrainConfig{};
  t.max_steps = 0;
  EXPECT_THROW(t.Validate(), ConfigError);
}

}  // namespace
}  // namespace ats
