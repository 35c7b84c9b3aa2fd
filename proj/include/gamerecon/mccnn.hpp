#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gamerecon::mccnn {

// One training example: joint trajectories as independent 1-D channels
// (12 joints x 2 coordinates = 24 channels), flattened channel-major.
struct TrajectorySample {
    std::vector<double> channels;  // [n_channels * T]
    int label = 0;
};

struct Dataset {
    int n_channels = 24;
    int length = 0;  // T
    int n_classes = 0;
    std::vector<std::string> catalog;  // joint names, for provenance
    std::vector<TrajectorySample> samples;

    int sample_count() const { return static_cast<int>(samples.size()); }
};

struct ChannelStats {
    std::vector<double> mean;
    std::vector<double> scale;           // standard deviation, 1 for flat channels
    std::vector<int> zero_variance;      // channels left unscaled
};

// Statistics over the listed samples only (pass the training split so the
// test split never leaks into normalization).
ChannelStats compute_channel_stats(const Dataset& data, const std::vector<int>& indices);
void apply_normalization(Dataset& data, const ChannelStats& stats);
// Standardizes every channel in place and returns the statistics for reuse
// at inference time.
ChannelStats normalize_channels(Dataset& data);

struct NetConfig {
    int channels = 24;
    int length = 0;  // T
    int n_classes = 0;
    int conv1_filters = 128;
    int conv1_kernel = 5;
    int conv2_filters = 128;
    int conv2_kernel = 9;
    int fc1_units = 128;
};

// conv(k1) -> ReLU -> conv(k2) -> ReLU -> flatten -> fc -> ReLU -> fc ->
// softmax, with same padding and stride 1 throughout, so the flatten width
// is conv2_filters * T.
class MccnnNet {
public:
    explicit MccnnNet(const NetConfig& config);

    const NetConfig& config() const { return config_; }

    // Centered uniform init scaled by fan-in.
    void init_weights(uint64_t seed);

    // Class probabilities for one sample of config.channels * config.length
    // values. Throws Error(shape_mismatch) on a wrong input size.
    std::vector<double> forward(const std::vector<double>& channels) const;

    int predict(const std::vector<double>& channels) const;

    // Flat views over every parameter tensor, in serialization order.
    std::vector<std::vector<double>*> parameter_tensors();
    std::vector<const std::vector<double>*> parameter_tensors() const;
    size_t parameter_count() const;

    ChannelStats norm_stats;  // carried with the model for inference

    // Parameters (exposed for the optimizer, serialization and tests).
    std::vector<double> conv1_w, conv1_b;  // [f1][ch][k1], [f1]
    std::vector<double> conv2_w, conv2_b;  // [f2][f1][k2], [f2]
    std::vector<double> fc1_w, fc1_b;      // [h][f2*T], [h]
    std::vector<double> fc2_w, fc2_b;      // [classes][h], [classes]

private:
    NetConfig config_;
};

struct Gradients {
    std::vector<double> conv1_w, conv1_b, conv2_w, conv2_b, fc1_w, fc1_b, fc2_w, fc2_b;

    explicit Gradients(const MccnnNet& net);
    void zero();
    void add(const Gradients& other);
    std::vector<std::vector<double>*> tensors();
};

// Forward + backward for one sample; accumulates parameter gradients and
// returns the cross-entropy loss. Scratch buffers live in the caller-owned
// workspace so batches can run without allocation.
struct Workspace;
Workspace* workspace_create(const MccnnNet& net);
void workspace_destroy(Workspace* ws);
double backprop_sample(const MccnnNet& net, const double* channels, int label,
                       Gradients& grads, Workspace& ws);

struct TrainConfig {
    double learning_rate = 0.0005;
    int batch_size = 40;  // must be divisible by the class count
    int epochs = 2000;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    uint64_t seed = 0;
    int threads = 0;              // 0 = use available hardware
    double early_stop_loss = 0.0;  // stop once mean epoch loss drops below; 0 = off
};

struct TrainResult {
    std::vector<double> loss_curve;  // mean cross-entropy per epoch
    int epochs_run = 0;
    bool early_stopped = false;
};

// Adam on balanced batches: every batch carries batch_size / n_classes
// samples of each class, cycling through shuffled per-class pools (minority
// classes repeat). Throws Error(missing_class) when a class has no samples
// and Error(invalid_config) when the batch size is not divisible.
TrainResult train(MccnnNet& net, const Dataset& data, const std::vector<int>& train_indices,
                  const TrainConfig& config);

std::vector<int> predict_all(const MccnnNet& net, const Dataset& data,
                             const std::vector<int>& indices);

// Mean per-class recall. Classes absent from the labels are excluded (their
// indices are reported through excluded when given).
double balanced_accuracy(const std::vector<int>& predictions, const std::vector<int>& labels,
                         int n_classes, std::vector<int>* excluded = nullptr);

double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels);

// counts[label][prediction]; row-normalized on request so the diagonal reads
// as per-class recall.
std::vector<std::vector<double>> confusion_matrix(const std::vector<int>& predictions,
                                                  const std::vector<int>& labels,
                                                  int n_classes, bool normalize_rows);

// Disjoint folds covering every sample, sizes differing by at most one,
// deterministic under the seed. Throws Error(invalid_k) when k exceeds the
// dataset size or k < 2.
std::vector<std::vector<int>> kfold_split(int n_samples, int k, uint64_t seed);

// Label-mapping utility (e.g. grouping pitch types into superclasses).
Dataset relabel(const Dataset& data, const std::vector<int>& mapping, int n_new_classes);

}  // namespace gamerecon::mccnn
