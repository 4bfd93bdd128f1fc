#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace docrep {
namespace mlp {

/// Stacked fully connected layers: ReLU after every hidden layer, linear
/// logits at the top. weights[i] is (out x in).
struct MLPModel {
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    double dropout_rate = 0.0;

    int num_layers() const { return static_cast<int>(weights.size()); }
    int input_dim() const { return weights.empty() ? 0 : static_cast<int>(weights.front().cols()); }
    int output_dim() const { return weights.empty() ? 0 : static_cast<int>(weights.back().rows()); }
};

struct TrainConfig {
    double learning_rate = 0.1;
    double momentum = 0.9;
    int batch_size = 32;
    int epochs = 100;
    double lr_decay = 0.5;    // multiplied in every lr_step_epochs epochs
    int lr_step_epochs = 0;   // 0 = constant learning rate
    double dropout_rate = 0.3;
    std::uint64_t seed = 0;
    int hidden_width = 256;
    int hidden_count = 1;
};

enum class Mode { train, eval };

struct ForwardResult {
    Eigen::VectorXd logits;
    std::vector<Eigen::VectorXd> hidden;  // post-ReLU activations, one per hidden layer
};

/// Train mode applies inverted dropout to the input of every fully connected
/// layer (units zeroed with prob p, survivors scaled by 1/(1-p)), with masks
/// drawn from the given seed. Eval mode applies no masking and no scaling.
ForwardResult forward(const Eigen::VectorXd& x, const MLPModel& model, Mode mode,
                      std::uint64_t seed = 0);

/// -log softmax(logits)[label], max-subtracted for stability.
double softmax_cross_entropy(const Eigen::VectorXd& logits, int label);

/// Momentum buffers plus the mask RNG for a training run.
struct SGDState {
    std::vector<Eigen::MatrixXd> velocity_w;
    std::vector<Eigen::VectorXd> velocity_b;
    std::mt19937_64 rng;
};
SGDState make_sgd_state(const MLPModel& model, std::uint64_t seed);

/// One SGD step on a mini-batch (rows of batch_x): exact gradients of the
/// mean batch loss, momentum update v <- m*v - lr*g, W <- W + v. Returns the
/// batch loss; throws NumericalError on non-finite loss or gradients.
double backward_sgd_step(const Eigen::MatrixXd& batch_x, const std::vector<int>& labels,
                         MLPModel& model, SGDState& state, double learning_rate, double momentum);

/// Fresh model with uniform(+-sqrt(6/(fan_in+fan_out))) weights, zero biases.
MLPModel init_model(int input_dim, int n_classes, const TrainConfig& config);

struct TrainReport {
    std::vector<double> epoch_loss;
    std::vector<double> val_accuracy;  // empty without a validation split
    int best_epoch = -1;
};

/// Epochs of seeded shuffled mini-batches; returns the model with the best
/// validation accuracy when a validation set is supplied, else the final
/// model. Labels must cover every class in [0, C).
MLPModel train(const Eigen::MatrixXd& features, const std::vector<int>& labels,
               const TrainConfig& config,
               const Eigen::MatrixXd* val_features = nullptr,
               const std::vector<int>* val_labels = nullptr,
               TrainReport* report = nullptr);

/// Eval-mode forward truncated at the chosen hidden layer (1-based,
/// post-ReLU), L2-normalized.
Eigen::VectorXd extract_activation(const Eigen::VectorXd& x, const MLPModel& model,
                                   int layer_index = 1);

/// argmax of eval-mode logits.
int predict(const Eigen::VectorXd& x, const MLPModel& model);

double accuracy(const Eigen::MatrixXd& features, const std::vector<int>& labels,
                const MLPModel& model);

}  // namespace mlp
}  // namespace docrep
