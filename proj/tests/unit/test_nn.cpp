// Copyright 2026 The EDBA-FL Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "nn/checkpoint.hpp"
#include "nn/loss.hpp"
#include "nn/models.hpp"
#include "nn/sgd.hpp"

#include "gradcheck.hpp"
#include "oracles.hpp"

using namespace edba;
using namespace edba::gradcheck;

TEST_CASE("forward: zero weights give zero logits") {
  MlpModel m({4, 3, 2}, Activation::relu);
  Rng rng(3);
  Tensor x = random_tensor({5, 4}, rng);
  Tensor y = forward(m, x);
  CHECK(y.shape == std::vector<std::size_t>{5, 2});
  for (double v : y.data) CHECK(v == 0.0);
}

TEST_CASE("forward: identity single layer returns the input") {
  MlpModel m({3, 3}, Activation::relu);
  auto w = m.params().view(m.params().slot("dense0.weight"));
  for (std::size_t i = 0; i < 3; ++i) w[i * 3 + i] = 1.0;
  Tensor x({1, 3}, {0.5, -2.0, 7.0});
  CHECK(forward(m, x).data == x.data);
}

TEST_CASE("forward: matches a per-element scalar oracle") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    for (Activation act : {Activation::relu, Activation::tanh}) {
      MlpModel m = MlpModel::create({4, 6, 3}, act, seed);
      randomise(m.params(), rng);
      Tensor x = random_tensor({3, 4}, rng);
      Tensor y = forward(m, x);
      const auto& p = m.params();
      auto w0 = p.view(p.slot("dense0.weight"));
      auto b0 = p.view(p.slot("dense0.bias"));
      auto w1 = p.view(p.slot("dense1.weight"));
      auto b1 = p.view(p.slot("dense1.bias"));
      for (std::size_t r = 0; r < 3; ++r) {
        double hidden[6];
        for (std::size_t j = 0; j < 6; ++j) {
          double s = b0[j];
          for (std::size_t i = 0; i < 4; ++i) s += w0[j * 4 + i] * x.at(r, i);
          hidden[j] = act == Activation::relu ? (s > 0 ? s : 0.0) : std::tanh(s);
        }
        for (std::size_t c = 0; c < 3; ++c) {
          double s = b1[c];
          for (std::size_t j = 0; j < 6; ++j) s += w1[c * 6 + j] * hidden[j];
          CHECK(y.at(r, c) == doctest::Approx(s).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("gradients: dense relu layers match finite differences on 100 instances") {
  FdStats st;
  for (std::uint64_t seed = 1; seed <= 100; ++seed)
    check_mlp_instance(seed, Activation::relu, seed % 2 == 0, st);
  CHECK(st.failures == 0);
  CHECK(st.checked > 10 * st.skipped);
}

TEST_CASE("gradients: dense tanh layers match finite differences on 100 instances") {
  FdStats st;
  for (std::uint64_t seed = 1; seed <= 100; ++seed)
    check_mlp_instance(1000 + seed, Activation::tanh, seed % 2 == 0, st);
  CHECK(st.failures == 0);
  CHECK(st.skipped == 0);
}

TEST_CASE("gradients: embedding model matches finite differences on 100 instances") {
  FdStats st;
  for (std::uint64_t seed = 1; seed <= 100; ++seed)
    check_seq_instance(2000 + seed, seed % 2 == 0, st);
  CHECK(st.failures == 0);
}

TEST_CASE("gradients: linear softmax closed form") {
  MlpModel m = MlpModel::create({3, 4}, Activation::relu, 9);
  Rng rng(9);
  randomise(m.params(), rng);
  Tensor x({1, 3}, {0.3, -0.2, 0.9});
  std::vector<int> y{2};
  FlatParams g = grad_params(m, x, LossSpec::cross_entropy(y));
  Tensor logits = forward(m, x);
  std::vector<double> p(4);
  softmax_row(logits.row(0), p);
  auto gw = g.view(g.slot("dense0.weight"));
  auto gb = g.view(g.slot("dense0.bias"));
  for (std::size_t c = 0; c < 4; ++c) {
    const double e = p[c] - (c == 2 ? 1.0 : 0.0);
    CHECK(gb[c] == doctest::Approx(e).epsilon(1e-12));
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(gw[c * 3 + i] == doctest::Approx(e * x.data[i]).epsilon(1e-12));
  }
}

TEST_CASE("gradients: vanish after fitting a separable toy set") {
  MlpModel m = MlpModel::create({2, 2}, Activation::relu, 4);
  Tensor x({4, 2}, {1, 0, 0.9, 0.1, 0, 1, 0.1, 0.9});
  std::vector<int> y{0, 0, 1, 1};
  SgdState s = SgdState::for_params(m.params(), 0.5, 0.0, 0.0);
  for (int i = 0; i < 20000; ++i) sgd_step(s, m.params(), grad_params(m, x, LossSpec::cross_entropy(y)));
  FlatParams g = grad_params(m, x, LossSpec::cross_entropy(y));
  CHECK(l2_norm(g.data()) < 1e-3);
}

TEST_CASE("grad_input: zero first layer gives zero input gradient") {
  MlpModel m = MlpModel::create({5, 4, 3}, Activation::tanh, 2);
  for (auto& v : m.params().view(m.params().slot("dense0.weight"))) v = 0.0;
  Rng rng(2);
  Tensor x = random_tensor({2, 5}, rng);
  std::vector<int> y{0, 1};
  Tensor g = grad_input(m, x, LossSpec::cross_entropy(y));
  for (double v : g.data) CHECK(v == 0.0);
}

TEST_CASE("grad_input: cosine loss has no component along the reference") {
  MlpModel m({3, 3}, Activation::relu);
  auto w = m.params().view(m.params().slot("dense0.weight"));
  for (std::size_t i = 0; i < 3; ++i) w[i * 3 + i] = 1.0;
  Tensor ref({1, 3}, {1.0, 2.0, -1.0});
  Tensor x({1, 3}, {2.0, 4.0, -2.0});
  Tensor g = grad_input(m, x, LossSpec::cosine_pair(ref));
  CHECK(std::abs(dot(g.data, ref.data)) < 1e-12);
}

TEST_CASE("cosine loss examples and errors") {
  CHECK(cosine_loss(Tensor({3}, {1, 2, 3}), Tensor({3}, {1, 2, 3})) == doctest::Approx(1.0));
  CHECK(cosine_loss(Tensor({2}, {1, 0}), Tensor({2}, {0, 1})) == doctest::Approx(0.0));
  CHECK(cosine_loss(Tensor({2}, {1, 1}), Tensor({2}, {-1, -1})) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(cosine_loss(Tensor({2}, {0, 0}), Tensor({2}, {0, 1})), Error);
  Tensor batch_a({2, 2}, {1, 0, 1, 1});
  Tensor batch_b({2, 2}, {0, 1, 1, 1});
  CHECK(cosine_loss(batch_a, batch_b) == doctest::Approx(0.5));
}

TEST_CASE("cosine loss is scale invariant") {
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    Tensor a = random_tensor({7}, rng);
    const double c = 1e-3 + 50.0 * uniform01(rng);
    Tensor b = a;
    for (auto& v : b.data) v *= c;
    CHECK(std::abs(cosine_loss(a, b) - 1.0) <= 1e-12);
  }
}

TEST_CASE("cross-entropy is non-negative and zero only at a one-hot prediction") {
  Rng rng(6);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> logits(5);
    for (auto& v : logits) v = 4.0 * standard_normal(rng);
    CHECK(cross_entropy_row(logits, static_cast<int>(uniform_index(rng, 5))) >= 0.0);
  }
  std::vector<double> onehot{800.0, 0.0, 0.0};
  CHECK(cross_entropy_row(onehot, 0) <= 1e-9);
  std::vector<double> soft{2.0, 0.0, 0.0};
  CHECK(cross_entropy_row(soft, 0) > 1e-9);
}

TEST_CASE("non-finite loss raises a numeric error") {
  MlpModel m = MlpModel::create({2, 2}, Activation::relu, 1);
  Tensor x({1, 2}, {std::nan(""), 0.0});
  std::vector<int> y{0};
  CHECK_THROWS_AS(grad_params(m, x, LossSpec::cross_entropy(y)), Error);
}

TEST_CASE("sgd: plain step, zero gradient, and hand-unrolled momentum") {
  MlpModel m = MlpModel::create({2, 2}, Activation::relu, 1);
  Rng rng(1);
  randomise(m.params(), rng);
  FlatParams g = m.params().zeros_like();
  for (auto& v : g.data()) v = standard_normal(rng);

  {
    FlatParams p = m.params();
    SgdState s = SgdState::for_params(p, 0.1, 0.0, 0.0);
    sgd_step(s, p, g);
    for (std::size_t i = 0; i < p.size(); ++i)
      CHECK(p.data()[i] == m.params().data()[i] - 0.1 * g.data()[i]);
  }
  {
    FlatParams p = m.params();
    SgdState s = SgdState::for_params(p, 0.1, 0.9, 0.0);
    for (auto& v : s.velocity.data()) v = 1.0;
    sgd_step(s, p, p.zeros_like());
    CHECK(p.data() != m.params().data());  // velocity still moves params
    for (double v : s.velocity.data()) CHECK(v == 0.9);
  }
  {
    const double lr = 0.05, mu = 0.9, wd = 5e-4;
    FlatParams p = m.params();
    SgdState s = SgdState::for_params(p, lr, mu, wd);
    FlatParams g2 = g;
    for (auto& v : g2.data()) v *= -0.5;
    sgd_step(s, p, g);
    sgd_step(s, p, g2);
    for (std::size_t i = 0; i < p.size(); ++i) {
      double th = m.params().data()[i], v = 0.0;
      v = mu * v + (g.data()[i] + wd * th);
      th -= lr * v;
      v = mu * v + (g2.data()[i] + wd * th);
      th -= lr * v;
      CHECK(p.data()[i] == th);
    }
  }
}

TEST_CASE("training is bitwise deterministic") {
  auto run = [] {
    MlpModel m = MlpModel::create({3, 5, 2}, Activation::relu, 11);
    Rng rng(11);
    Tensor x = random_tensor({8, 3}, rng);
    std::vector<int> y{0, 1, 0, 1, 1, 0, 0, 1};
    SgdState s = SgdState::for_params(m.params(), 0.1, 0.9, 5e-4);
    for (int i = 0; i < 50; ++i) sgd_step(s, m.params(), grad_params(m, x, LossSpec::cross_entropy(y)));
    return m.params();
  };
  CHECK(run() == run());
}

TEST_CASE("checkpoint round-trips bit-exactly and restores the model") {
  SeqModel s = SeqModel::create(12, 4, {6}, 3, Activation::tanh, 8);
  MlpModel m = MlpModel::create({5, 7, 3}, Activation::relu, 8);
  for (const Checkpoint& ck : {Checkpoint{m.architecture(), m.params()},
                               Checkpoint{s.architecture(), s.params()}}) {
    Checkpoint back = decode_checkpoint(encode_checkpoint(ck));
    CHECK(back.architecture == ck.architecture);
    CHECK(back.params == ck.params);
    AnyModel restored = restore_model(back);
    std::visit([&](const auto& model) { CHECK(model.params() == ck.params); }, restored);
  }
  const auto path = (std::filesystem::temp_directory_path() / "edba_nn_ckpt.bin").string();
  save_checkpoint(path, {m.architecture(), m.params()});
  CHECK(load_checkpoint(path).params == m.params());
  std::filesystem::remove(path);

  std::string bytes = encode_checkpoint({m.architecture(), m.params()});
  bytes[0] = 'X';
  CHECK_THROWS_AS(decode_checkpoint(bytes), Error);
  CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, 20)), Error);
}
