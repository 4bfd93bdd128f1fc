#include "docrep/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "docrep/errors.hpp"
#include "docrep/linalg.hpp"

namespace docrep {
namespace mlp {

namespace {

// Inverted dropout mask entries: 0 with prob p, else 1/(1-p).
Eigen::MatrixXd dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, std::mt19937_64& rng) {
    Eigen::MatrixXd mask(rows, cols);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double keep_scale = 1.0 / (1.0 - p);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r)
            mask(r, c) = u(rng) < p ? 0.0 : keep_scale;
    return mask;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    Eigen::VectorXd e = (logits.array() - logits.maxCoeff()).exp();
    return e / e.sum();
}

void check_model(const MLPModel& model) {
    if (model.weights.empty() || model.weights.size() != model.biases.size())
        throw std::invalid_argument("mlp: malformed model");
    if (!(model.dropout_rate >= 0.0 && model.dropout_rate < 1.0))
        throw std::invalid_argument("mlp: dropout_rate must lie in [0,1)");
}

}  // namespace

ForwardResult forward(const Eigen::VectorXd& x, const MLPModel& model, Mode mode, std::uint64_t seed) {
    check_model(model);
    if (x.size() != model.input_dim())
        throw std::invalid_argument("mlp::forward: input dimension mismatch");
    const bool drop = mode == Mode::train && model.dropout_rate > 0.0;
    std::mt19937_64 rng(seed);

    ForwardResult out;
    Eigen::VectorXd a = x;
    const int layers = model.num_layers();
    for (int i = 0; i < layers; ++i) {
        if (drop)
            a = a.cwiseProduct(dropout_mask(a.size(), 1, model.dropout_rate, rng).col(0));
        Eigen::VectorXd z = model.weights[i] * a + model.biases[i];
        if (i + 1 < layers) {
            a = z.cwiseMax(0.0);
            out.hidden.push_back(a);
        } else {
            out.logits = z;
        }
    }
    return out;
}

double softmax_cross_entropy(const Eigen::VectorXd& logits, int label) {
    if (label < 0 || label >= logits.size())
        throw std::invalid_argument("softmax_cross_entropy: label out of range");
    const double m = logits.maxCoeff();
    const double lse = m + std::log((logits.array() - m).exp().sum());
    return lse - logits(label);
}

SGDState make_sgd_state(const MLPModel& model, std::uint64_t seed) {
    SGDState st;
    st.rng.seed(seed);
    for (std::size_t i = 0; i < model.weights.size(); ++i) {
        st.velocity_w.emplace_back(Eigen::MatrixXd::Zero(model.weights[i].rows(), model.weights[i].cols()));
        st.velocity_b.emplace_back(Eigen::VectorXd::Zero(model.biases[i].size()));
    }
    return st;
}

double backward_sgd_step(const Eigen::MatrixXd& batch_x, const std::vector<int>& labels,
                         MLPModel& model, SGDState& state, double learning_rate, double momentum) {
    check_model(model);
    const Eigen::Index batch = batch_x.rows();
    if (batch == 0)
        throw std::invalid_argument("backward_sgd_step: empty batch");
    if (labels.size() != static_cast<std::size_t>(batch))
        throw std::invalid_argument("backward_sgd_step: label count mismatch");
    if (batch_x.cols() != model.input_dim())
        throw std::invalid_argument("backward_sgd_step: input dimension mismatch");

    const int layers = model.num_layers();
    const bool drop = model.dropout_rate > 0.0;

    // Columns are samples.
    std::vector<Eigen::MatrixXd> inputs(layers);   // post-dropout input of each layer
    std::vector<Eigen::MatrixXd> pre(layers);      // pre-activation of each layer
    std::vector<Eigen::MatrixXd> masks(drop ? layers : 0);

    Eigen::MatrixXd a = batch_x.transpose();
    for (int i = 0; i < layers; ++i) {
        if (drop) {
            masks[i] = dropout_mask(a.rows(), a.cols(), model.dropout_rate, state.rng);
            a = a.cwiseProduct(masks[i]);
        }
        inputs[i] = a;
        pre[i] = (model.weights[i] * a).colwise() + model.biases[i];
        if (i + 1 < layers) a = pre[i].cwiseMax(0.0);
    }

    // Mean cross-entropy loss and logit gradient.
    const Eigen::MatrixXd& logits = pre[layers - 1];
    double loss = 0.0;
    Eigen::MatrixXd delta(logits.rows(), batch);
    for (Eigen::Index s = 0; s < batch; ++s) {
        const int y = labels[static_cast<std::size_t>(s)];
        if (y < 0 || y >= logits.rows())
            throw std::invalid_argument("backward_sgd_step: label out of range");
        loss += softmax_cross_entropy(logits.col(s), y);
        delta.col(s) = softmax(logits.col(s));
        delta(y, s) -= 1.0;
    }
    loss /= static_cast<double>(batch);
    delta /= static_cast<double>(batch);
    if (!std::isfinite(loss))
        throw NumericalError("backward_sgd_step: non-finite loss");

    // Backprop and momentum update.
    for (int i = layers - 1; i >= 0; --i) {
        Eigen::MatrixXd grad_w = delta * inputs[i].transpose();
        Eigen::VectorXd grad_b = delta.rowwise().sum();
        if (!grad_w.allFinite() || !grad_b.allFinite())
            throw NumericalError("backward_sgd_step: non-finite gradient at layer " + std::to_string(i));
        if (i > 0) {
            Eigen::MatrixXd back = model.weights[i].transpose() * delta;  // grad wrt dropped input
            if (drop) back = back.cwiseProduct(masks[i]);
            delta = back.cwiseProduct((pre[i - 1].array() > 0.0).cast<double>().matrix());
        }
        state.velocity_w[i] = momentum * state.velocity_w[i] - learning_rate * grad_w;
        state.velocity_b[i] = momentum * state.velocity_b[i] - learning_rate * grad_b;
        model.weights[i] += state.velocity_w[i];
        model.biases[i] += state.velocity_b[i];
    }
    return loss;
}

MLPModel init_model(int input_dim, int n_classes, const TrainConfig& config) {
    if (input_dim < 1 || n_classes < 2)
        throw std::invalid_argument("init_model: need input_dim >= 1 and >= 2 classes");
    if (config.hidden_count < 0 || (config.hidden_count > 0 && config.hidden_width < 1))
        throw std::invalid_argument("init_model: bad hidden layout");
    MLPModel model;
    model.dropout_rate = config.dropout_rate;
    std::mt19937_64 rng(config.seed);
    int in = input_dim;
    for (int i = 0; i <= config.hidden_count; ++i) {
        const int out = i == config.hidden_count ? n_classes : config.hidden_width;
        const double bound = std::sqrt(6.0 / (in + out));
        std::uniform_real_distribution<double> u(-bound, bound);
        Eigen::MatrixXd w(out, in);
        for (Eigen::Index c = 0; c < w.cols(); ++c)
            for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = u(rng);
        model.weights.push_back(std::move(w));
        model.biases.emplace_back(Eigen::VectorXd::Zero(out));
        in = out;
    }
    return model;
}

MLPModel train(const Eigen::MatrixXd& features, const std::vector<int>& labels,
               const TrainConfig& config, const Eigen::MatrixXd* val_features,
               const std::vector<int>* val_labels, TrainReport* report) {
    const Eigen::Index n = features.rows();
    if (n == 0 || labels.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("mlp::train: features/labels mismatch");
    const int n_classes = *std::max_element(labels.begin(), labels.end()) + 1;
    if (n_classes < 2)
        throw std::invalid_argument("mlp::train: need at least 2 classes");
    std::vector<int> counts(static_cast<std::size_t>(n_classes), 0);
    for (int y : labels) {
        if (y < 0) throw std::invalid_argument("mlp::train: negative label");
        ++counts[static_cast<std::size_t>(y)];
    }
    for (int c = 0; c < n_classes; ++c)
        if (counts[static_cast<std::size_t>(c)] == 0)
            throw std::invalid_argument("mlp::train: class " + std::to_string(c) + " has zero samples");

    MLPModel model = init_model(static_cast<int>(features.cols()), n_classes, config);
    SGDState state = make_sgd_state(model, config.seed + 1);
    std::mt19937_64 shuffle_rng(config.seed + 2);

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    MLPModel best = model;
    double best_acc = -1.0;
    int best_epoch = -1;
    double lr = config.learning_rate;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        if (config.lr_step_epochs > 0 && epoch > 0 && epoch % config.lr_step_epochs == 0)
            lr *= config.lr_decay;
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double epoch_loss = 0.0;
        int batches = 0;
        for (Eigen::Index start = 0; start < n; start += config.batch_size) {
            const Eigen::Index size = std::min<Eigen::Index>(config.batch_size, n - start);
            Eigen::MatrixXd bx(size, features.cols());
            std::vector<int> by(static_cast<std::size_t>(size));
            for (Eigen::Index j = 0; j < size; ++j) {
                bx.row(j) = features.row(order[static_cast<std::size_t>(start + j)]);
                by[static_cast<std::size_t>(j)] = labels[static_cast<std::size_t>(order[static_cast<std::size_t>(start + j)])];
            }
            epoch_loss += backward_sgd_step(bx, by, model, state, lr, config.momentum);
            ++batches;
        }
        if (report) report->epoch_loss.push_back(epoch_loss / std::max(batches, 1));
        if (val_features && val_labels) {
            const double acc = accuracy(*val_features, *val_labels, model);
            if (report) report->val_accuracy.push_back(acc);
            if (acc > best_acc) {
                best_acc = acc;
                best = model;
                best_epoch = epoch;
            }
        }
    }
    if (report) report->best_epoch = best_epoch;
    return (val_features && val_labels) ? best : model;
}

Eigen::VectorXd extract_activation(const Eigen::VectorXd& x, const MLPModel& model, int layer_index) {
    check_model(model);
    if (layer_index < 1 || layer_index >= model.num_layers())
        throw std::invalid_argument("extract_activation: layer index out of range");
    ForwardResult r = forward(x, model, Mode::eval);
    return linalg::l2_normalize(r.hidden[static_cast<std::size_t>(layer_index - 1)]);
}

int predict(const Eigen::VectorXd& x, const MLPModel& model) {
    ForwardResult r = forward(x, model, Mode::eval);
    Eigen::Index best = 0;
    r.logits.maxCoeff(&best);
    return static_cast<int>(best);
}

double accuracy(const Eigen::MatrixXd& features, const std::vector<int>& labels, const MLPModel& model) {
    if (features.rows() == 0) return 0.0;
    int correct = 0;
    for (Eigen::Index i = 0; i < features.rows(); ++i)
        if (predict(features.row(i).transpose(), model) == labels[static_cast<std::size_t>(i)]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(features.rows());
}

}  // namespace mlp
}  // namespace docrep
