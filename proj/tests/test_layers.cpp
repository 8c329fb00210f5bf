#include <doctest.h>

#include <cmath>
#include <limits>

#include <creditnn/errors.hpp>
#include <creditnn/layers.hpp>
#include <creditnn/loss.hpp>
#include <creditnn/network.hpp>
#include <creditnn/rng.hpp>

using namespace creditnn;
using doctest::Approx;

namespace {
double sigmoid_ref(double z) { return 1.0 / (1.0 + std::exp(-z)); }
}  // namespace

TEST_CASE("dense forward identity and relu clamp") {
  LayerParams p = LayerParams::zeros({2, 2}, {2});
  p.weights(0, 0) = 1.0;
  p.weights(1, 1) = 1.0;
  Tensor x = Tensor::of({1, 2}, {1, 2});
  Tensor y = dense_forward(p, x, Activation::relu);
  CHECK(y(0, 0) == 1.0);
  CHECK(y(0, 1) == 2.0);

  Tensor xn = Tensor::of({1, 2}, {-1, 2});
  Tensor yn = dense_forward(p, xn, Activation::relu);
  CHECK(yn(0, 0) == 0.0);
  CHECK(yn(0, 1) == 2.0);
}

TEST_CASE("dense forward hand example") {
  // W = [[1,1],[1,-1]], b = [0.5, 0], input [2,3]
  LayerParams p = LayerParams::zeros({2, 2}, {2});
  p.weights(0, 0) = 1.0;
  p.weights(0, 1) = 1.0;
  p.weights(1, 0) = 1.0;
  p.weights(1, 1) = -1.0;
  p.biases(0) = 0.5;
  Tensor x = Tensor::of({1, 2}, {2, 3});
  Tensor pre = dense_forward(p, x, Activation::identity);
  CHECK(pre(0, 0) == Approx(5.5));
  CHECK(pre(0, 1) == Approx(-1.0));
  Tensor post = dense_forward(p, x, Activation::relu);
  CHECK(post(0, 0) == Approx(5.5));
  CHECK(post(0, 1) == 0.0);
}

TEST_CASE("dense shape errors name both shapes") {
  LayerParams p = LayerParams::zeros({3, 2}, {2});
  Tensor x = Tensor::zeros({1, 4});
  CHECK_THROWS_AS(dense_forward(p, x, Activation::relu), DimensionError);
}

TEST_CASE("conv1d identity kernel and hand example") {
  // single filter, kernel [1], weight 1, bias 0 -> identity
  LayerParams id = LayerParams::zeros({1, 1, 1}, {1});
  id.weights(0) = 1.0;
  Tensor x = Tensor::of({1, 4, 1}, {1, 2, 3, 4});
  Tensor y = conv1d_forward(id, x, 1);
  REQUIRE(y.shape == std::vector<Index>{1, 4, 1});
  for (Index i = 0; i < 4; ++i) CHECK(y(0, i, 0) == x(0, i, 0));

  // kernel [1,0,-1] on [1,2,3,4] -> [-2,-2]
  LayerParams k = LayerParams::zeros({3, 1, 1}, {1});
  k.weights(0) = 1.0;
  k.weights(1) = 0.0;
  k.weights(2) = -1.0;
  Tensor out = conv1d_forward(k, x, 1);
  REQUIRE(out.shape == std::vector<Index>{1, 2, 1});
  CHECK(out(0, 0, 0) == Approx(-2.0));
  CHECK(out(0, 1, 0) == Approx(-2.0));

  // zero input, bias 0.5 -> all outputs 0.5
  LayerParams b = LayerParams::zeros({3, 1, 2}, {2});
  b.biases(0) = 0.5;
  b.biases(1) = 0.5;
  Tensor z = Tensor::zeros({2, 5, 1});
  Tensor yb = conv1d_forward(b, z, 1);
  for (Index i = 0; i < yb.size(); ++i) CHECK(yb.data[i] == 0.5);

  // kernel larger than input
  Tensor tiny = Tensor::zeros({1, 2, 1});
  CHECK_THROWS_AS(conv1d_forward(k, tiny, 1), DimensionError);
}

TEST_CASE("conv1d stride and output length") {
  LayerParams k = LayerParams::zeros({2, 1, 1}, {1});
  k.weights(0) = 1.0;
  k.weights(1) = 1.0;
  Tensor x = Tensor::of({1, 6, 1}, {1, 2, 3, 4, 5, 6});
  Tensor y = conv1d_forward(k, x, 2);
  REQUIRE(y.shape == std::vector<Index>{1, 3, 1});
  CHECK(y(0, 0, 0) == 3.0);
  CHECK(y(0, 1, 0) == 7.0);
  CHECK(y(0, 2, 0) == 11.0);
}

TEST_CASE("conv2d identity kernel keeps input") {
  LayerParams p = LayerParams::zeros({3, 3, 1, 1}, {1});
  p.weights.data.setZero();
  // center tap (1,1)
  p.weights(1, 1, 0, 0) = 1.0;
  Tensor x = Tensor::zeros({1, 4, 5, 1});
  Rng rng(3);
  for (Index i = 0; i < x.size(); ++i) x.data[i] = rng.uniform(-1, 1);
  Tensor y = conv2d_forward(p, x, 1);
  REQUIRE(y.shape == x.shape);
  for (Index i = 0; i < x.size(); ++i) CHECK(y.data[i] == Approx(x.data[i]));
}

TEST_CASE("conv2d all-ones kernel on all-ones input counts overlap") {
  LayerParams p = LayerParams::zeros({3, 3, 1, 1}, {1});
  p.weights.data.setOnes();
  Tensor x = Tensor::full({1, 4, 4, 1}, 1.0);
  Tensor y = conv2d_forward(p, x, 1);
  REQUIRE(y.shape == std::vector<Index>{1, 4, 4, 1});
  CHECK(y(0, 1, 1, 0) == Approx(9.0));
  CHECK(y(0, 2, 2, 0) == Approx(9.0));
  CHECK(y(0, 0, 0, 0) == Approx(4.0));
  CHECK(y(0, 3, 3, 0) == Approx(4.0));
  CHECK(y(0, 0, 1, 0) == Approx(6.0));
}

TEST_CASE("conv2d zero kernel and bias") {
  LayerParams p = LayerParams::zeros({3, 3, 1, 2}, {2});
  p.biases(0) = -1.5;
  p.biases(1) = 2.5;
  Tensor x = Tensor::full({2, 4, 4, 1}, 3.0);
  Tensor y = conv2d_forward(p, x, 1);
  for (Index b = 0; b < 2; ++b)
    for (Index r = 0; r < 4; ++r)
      for (Index c = 0; c < 4; ++c) {
        CHECK(y(b, r, c, 0) == -1.5);
        CHECK(y(b, r, c, 1) == 2.5);
      }
  CHECK_THROWS_AS(conv2d_forward(p, x, 0), ConfigError);
}

TEST_CASE("conv2d stride produces ceil dims") {
  LayerParams p = LayerParams::zeros({3, 3, 1, 1}, {1});
  Tensor x = Tensor::zeros({1, 5, 7, 1});
  Tensor y = conv2d_forward(p, x, 2);
  CHECK(y.shape == std::vector<Index>{1, 3, 4, 1});
}

TEST_CASE("maxpool forward, ties, and backward routing") {
  Tensor x = Tensor::of({1, 4, 1}, {1, 3, 2, 5});
  Tensor y = maxpool_forward(x, 2, 2);
  REQUIRE(y.shape == std::vector<Index>{1, 2, 1});
  CHECK(y(0, 0, 0) == 3.0);
  CHECK(y(0, 1, 0) == 5.0);

  Tensor c = Tensor::full({1, 6, 2}, 1.0);
  Tensor yc = maxpool_forward(c, 3, 3);
  REQUIRE(yc.shape == std::vector<Index>{1, 2, 2});
  for (Index i = 0; i < yc.size(); ++i) CHECK(yc.data[i] == 1.0);

  // tie [2,2] -> 2, grad routed to the first element
  MaxPool1DLayer pool(2, 2);
  Tensor tie = Tensor::of({1, 2, 1}, {2, 2});
  Tensor out = pool.forward(tie, false, nullptr);
  CHECK(out(0, 0, 0) == 2.0);
  Tensor grad = Tensor::of({1, 1, 1}, {1.0});
  Tensor back = pool.backward(grad);
  CHECK(back(0, 0, 0) == 1.0);
  CHECK(back(0, 1, 0) == 0.0);

  CHECK_THROWS_AS(maxpool_forward(tie, 3, 1), DimensionError);
}

TEST_CASE("maxpool backward touches exactly one input per window") {
  Rng rng(11);
  MaxPool1DLayer pool(2, 2);
  Tensor x = Tensor::zeros({3, 8, 2});
  for (Index i = 0; i < x.size(); ++i) x.data[i] = rng.normal();
  pool.forward(x, false, nullptr);
  Tensor g = Tensor::full({3, 4, 2}, 1.0);
  Tensor back = pool.backward(g);
  int nonzero = 0;
  for (Index i = 0; i < back.size(); ++i)
    if (back.data[i] != 0.0) ++nonzero;
  CHECK(nonzero == 3 * 4 * 2);
  CHECK(back.data.sum() == Approx(g.data.sum()));
}

TEST_CASE("lstm step zero-parameter algebra") {
  LayerParams p = LayerParams::zeros({3 + 2, 8}, {8});
  Tensor x = Tensor::of({1, 3}, {0.3, -0.2, 0.7});
  Tensor h0 = Tensor::zeros({1, 2});
  Tensor c0 = Tensor::of({1, 2}, {0.8, -0.4});
  auto [h, c] = lstm_step(p, x, h0, c0);
  for (Index u = 0; u < 2; ++u) {
    CHECK(c(0, u) == Approx(0.5 * c0(0, u)).epsilon(1e-12));
    CHECK(h(0, u) == Approx(0.5 * std::tanh(0.5 * c0(0, u))).epsilon(1e-12));
  }

  Tensor czero = Tensor::zeros({1, 2});
  auto [h2, c2] = lstm_step(p, x, h0, czero);
  CHECK(h2.data.isZero());
  CHECK(c2.data.isZero());
}

TEST_CASE("lstm step matches a scalar recurrence oracle") {
  // 1 input feature, 1 unit; hand-set weights, gate order [i, f, g, o].
  LayerParams p = LayerParams::zeros({2, 4}, {4});
  const double wxi = 0.4, wxf = -0.3, wxg = 0.8, wxo = 0.2;
  const double whi = 0.1, whf = 0.5, whg = -0.6, who = 0.7;
  const double bi = 0.05, bf = -0.1, bg = 0.2, bo = 0.0;
  p.weights(0, 0) = wxi;
  p.weights(0, 1) = wxf;
  p.weights(0, 2) = wxg;
  p.weights(0, 3) = wxo;
  p.weights(1, 0) = whi;
  p.weights(1, 1) = whf;
  p.weights(1, 2) = whg;
  p.weights(1, 3) = who;
  p.biases(0) = bi;
  p.biases(1) = bf;
  p.biases(2) = bg;
  p.biases(3) = bo;

  double h = 0.0, c = 0.0;
  const double xs[3] = {0.5, -1.2, 0.9};
  Tensor ht = Tensor::zeros({1, 1}), ct = Tensor::zeros({1, 1});
  for (double xv : xs) {
    // scalar oracle
    const double i = sigmoid_ref(wxi * xv + whi * h + bi);
    const double f = sigmoid_ref(wxf * xv + whf * h + bf);
    const double g = std::tanh(wxg * xv + whg * h + bg);
    const double o = sigmoid_ref(wxo * xv + who * h + bo);
    c = f * c + i * g;
    h = o * std::tanh(c);

    Tensor xt = Tensor::of({1, 1}, {xv});
    auto [hn, cn] = lstm_step(p, xt, ht, ct);
    ht = hn;
    ct = cn;
    CHECK(ht(0, 0) == Approx(h).epsilon(1e-12));
    CHECK(ct(0, 0) == Approx(c).epsilon(1e-12));
  }

  Tensor bad = Tensor::zeros({1, 3});
  CHECK_THROWS_AS(lstm_step(p, Tensor::zeros({1, 1}), bad, Tensor::zeros({1, 3})),
                  DimensionError);
}

TEST_CASE("lstm layer consumes the sequence and emits final hidden state") {
  Rng rng(21);
  Network net;
  net.add(std::make_unique<LSTMLayer>(3, 2));
  net.init_params(rng);
  Tensor x = Tensor::zeros({2, 4, 3});
  for (Index i = 0; i < x.size(); ++i) x.data[i] = rng.uniform(-1, 1);
  Tensor h = net.forward(x, false, nullptr);
  CHECK(h.shape == std::vector<Index>{2, 2});
  CHECK(h.all_finite());
}

TEST_CASE("softmax cross entropy examples") {
  // equal logits, K classes -> ln K
  Tensor eq = Tensor::full({3, 5}, 1.7);
  std::vector<int> labels = {0, 2, 4};
  LossValue l = softmax_cross_entropy(eq, labels);
  CHECK(l.value == Approx(std::log(5.0)).epsilon(1e-12));
  for (Index b = 0; b < 3; ++b) {
    double row = 0.0;
    for (Index k = 0; k < 5; ++k) row += l.probs(b, k);
    CHECK(row == Approx(1.0).epsilon(1e-12));
  }

  // shift invariance
  Tensor lg = Tensor::of({1, 3}, {0.2, -1.1, 0.7});
  Tensor shifted = lg;
  shifted.data.array() += 1234.5;
  LossValue a = softmax_cross_entropy(lg, {2});
  LossValue b = softmax_cross_entropy(shifted, {2});
  CHECK(a.value == Approx(b.value).epsilon(1e-9));
  for (Index k = 0; k < 3; ++k) CHECK(a.probs(0, k) == Approx(b.probs(0, k)).epsilon(1e-9));

  // logits [2,0], label 0 -> ln(1 + e^-2)
  LossValue c = softmax_cross_entropy(Tensor::of({1, 2}, {2, 0}), {0});
  CHECK(c.value == Approx(std::log(1.0 + std::exp(-2.0))).epsilon(1e-12));

  CHECK_THROWS_AS(softmax_cross_entropy(lg, {3}), LabelError);
  CHECK_THROWS_AS(softmax_cross_entropy(lg, {-1}), LabelError);
}

TEST_CASE("cross entropy gradient is (p - onehot)/batch") {
  Tensor lg = Tensor::of({2, 3}, {0.2, -1.1, 0.7, 0.0, 0.3, -0.4});
  std::vector<int> y = {2, 0};
  LossValue l = softmax_cross_entropy(lg, y);
  Tensor g = softmax_cross_entropy_grad(l, y);
  for (Index b = 0; b < 2; ++b)
    for (Index k = 0; k < 3; ++k) {
      const double expect = (l.probs(b, k) - (y[static_cast<std::size_t>(b)] == k ? 1.0 : 0.0)) / 2.0;
      CHECK(g(b, k) == Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("dropout identities and mask statistics") {
  Rng rng(17);
  Tensor x = Tensor::full({1, 100}, 1.0);
  Tensor same = dropout_apply(x, 0.0, true, rng);
  for (Index i = 0; i < x.size(); ++i) CHECK(same.data[i] == 1.0);
  Tensor inf = dropout_apply(x, 0.7, false, rng);
  for (Index i = 0; i < x.size(); ++i) CHECK(inf.data[i] == 1.0);
  CHECK_THROWS_AS(dropout_apply(x, 1.0, true, rng), ConfigError);
  CHECK_THROWS_AS(dropout_apply(x, -0.1, true, rng), ConfigError);

  // law of large numbers: 1e6 units at rate 0.5 keep mean within [0.99, 1.01]
  Tensor big = Tensor::full({1, 1000000}, 1.0);
  Tensor masked = dropout_apply(big, 0.5, true, rng);
  const double mean = masked.data.sum() / static_cast<double>(masked.size());
  CHECK(mean > 0.99);
  CHECK(mean < 1.01);
  // survivors are scaled by 2
  bool seen_two = false, seen_zero = false;
  for (Index i = 0; i < 100; ++i) {
    if (masked.data[i] == 2.0) seen_two = true;
    if (masked.data[i] == 0.0) seen_zero = true;
  }
  CHECK(seen_two);
  CHECK(seen_zero);
}

TEST_CASE("network state errors and zero-grad backward") {
  Network net;
  net.add(std::make_unique<DenseLayer>(3, 2, Activation::relu));
  CHECK_THROWS_AS(net.backward(Tensor::zeros({1, 2})), StateError);

  Rng rng(1);
  net.init_params(rng);
  Tensor x = Tensor::zeros({2, 3});
  for (Index i = 0; i < x.size(); ++i) x.data[i] = rng.uniform(-1, 1);
  net.forward(x, false, nullptr);
  net.zero_grads();
  net.backward(Tensor::zeros({2, 2}));
  for (LayerParams* p : net.params()) {
    CHECK(p->weight_grad.data.isZero());
    CHECK(p->bias_grad.data.isZero());
  }
}

TEST_CASE("sgd update arithmetic") {
  Network net;
  net.add(std::make_unique<DenseLayer>(1, 1, Activation::identity));
  LayerParams* p = net.params()[0];
  p->weights(0) = 1.0;
  p->weight_grad(0) = 2.0;
  net.sgd_update(0.05);
  CHECK(p->weights(0) == Approx(0.9).epsilon(1e-15));
  // lr 0 -> unchanged
  p->weight_grad(0) = 5.0;
  net.sgd_update(0.0);
  CHECK(p->weights(0) == Approx(0.9).epsilon(1e-15));
}

TEST_CASE("repeated sgd on a convex quadratic decreases the loss") {
  // f(w) = 0.5 * (w - 3)^2 via manual gradient injection.
  Network net;
  net.add(std::make_unique<DenseLayer>(1, 1, Activation::identity));
  LayerParams* p = net.params()[0];
  p->weights(0) = -4.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int step = 0; step < 50; ++step) {
    const double w = p->weights(0);
    const double loss = 0.5 * (w - 3.0) * (w - 3.0);
    CHECK(loss <= prev);
    prev = loss;
    p->weight_grad(0) = w - 3.0;
    net.sgd_update(0.5);  // below the curvature bound 2/L = 2
  }
  CHECK(p->weights(0) == Approx(3.0).epsilon(1e-6));
}

TEST_CASE("linear network gradient equals the normal-equations gradient") {
  // Squared loss L = ||XW - Y||^2 / (2N); dL/dW = X^T (XW - Y) / N.
  Rng rng(31);
  const Index n = 6, d = 4, k = 2;
  Tensor x = Tensor::zeros({n, d});
  for (Index i = 0; i < x.size(); ++i) x.data[i] = rng.normal();
  Eigen::MatrixXd Y(n, k);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < k; ++j) Y(i, j) = rng.normal();

  Network net;
  net.add(std::make_unique<DenseLayer>(d, k, Activation::identity));
  net.init_params(rng);
  Tensor out = net.forward(x, false, nullptr);
  Eigen::MatrixXd resid = Eigen::MatrixXd(out.mat(n, k)) - Y;
  Tensor grad = Tensor::zeros({n, k});
  grad.mat(n, k) = resid / static_cast<double>(n);
  net.zero_grads();
  net.backward(grad);

  LayerParams* p = net.params()[0];
  Eigen::MatrixXd expect =
      Eigen::MatrixXd(x.mat(n, d)).transpose() * resid / static_cast<double>(n);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < k; ++j)
      CHECK(p->weight_grad(i, j) == Approx(expect(i, j)).epsilon(1e-10));
}

TEST_CASE("network snapshot restore round trip") {
  Rng rng(13);
  Network net;
  net.add(std::make_unique<DenseLayer>(4, 3, Activation::relu));
  net.add(std::make_unique<DenseLayer>(3, 2, Activation::identity));
  net.init_params(rng);
  Eigen::VectorXd snap = net.snapshot();
  CHECK(snap.size() == net.param_count());
  CHECK(net.param_count() == 4 * 3 + 3 + 3 * 2 + 2);

  Tensor x = Tensor::zeros({1, 4});
  for (Index i = 0; i < 4; ++i) x.data[i] = rng.uniform(-1, 1);
  Tensor before = net.forward(x, false, nullptr);

  // perturb, then restore
  for (LayerParams* p : net.params()) p->weights.data.array() += 0.5;
  net.restore(snap);
  Tensor after = net.forward(x, false, nullptr);
  for (Index i = 0; i < before.size(); ++i) CHECK(after.data[i] == before.data[i]);

  CHECK_THROWS_AS(net.restore(Eigen::VectorXd::Zero(3)), DimensionError);
}
