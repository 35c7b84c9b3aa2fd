#include "gamerecon/mccnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>

#include "gamerecon/error.hpp"

namespace gamerecon::mccnn {

ChannelStats compute_channel_stats(const Dataset& data, const std::vector<int>& indices) {
    const int C = data.n_channels;
    const int T = data.length;
    ChannelStats stats;
    stats.mean.assign(C, 0.0);
    stats.scale.assign(C, 1.0);
    if (indices.empty()) throw Error(ErrorCode::bad_input, "no samples to compute stats from");

    const double n = static_cast<double>(indices.size()) * T;
    for (int c = 0; c < C; ++c) {
        double sum = 0.0;
        for (int i : indices) {
            const double* row = data.samples[i].channels.data() + c * T;
            for (int t = 0; t < T; ++t) sum += row[t];
        }
        double mean = sum / n;
        double var = 0.0;
        for (int i : indices) {
            const double* row = data.samples[i].channels.data() + c * T;
            for (int t = 0; t < T; ++t) var += (row[t] - mean) * (row[t] - mean);
        }
        var /= n;
        stats.mean[c] = mean;
        if (var > 1e-24) {
            stats.scale[c] = std::sqrt(var);
        } else {
            stats.scale[c] = 1.0;  // flat channel: center only
            stats.zero_variance.push_back(c);
        }
    }
    return stats;
}

void apply_normalization(Dataset& data, const ChannelStats& stats) {
    const int C = data.n_channels;
    const int T = data.length;
    for (auto& sample : data.samples) {
        for (int c = 0; c < C; ++c) {
            double* row = sample.channels.data() + c * T;
            for (int t = 0; t < T; ++t) row[t] = (row[t] - stats.mean[c]) / stats.scale[c];
        }
    }
}

ChannelStats normalize_channels(Dataset& data) {
    std::vector<int> all(data.samples.size());
    std::iota(all.begin(), all.end(), 0);
    ChannelStats stats = compute_channel_stats(data, all);
    apply_normalization(data, stats);
    return stats;
}

MccnnNet::MccnnNet(const NetConfig& config) : config_(config) {
    if (config.channels < 1 || config.length < 1 || config.n_classes < 1)
        throw Error(ErrorCode::invalid_config, "net dimensions must be positive");
    conv1_w.assign(static_cast<size_t>(config.conv1_filters) * config.channels *
                       config.conv1_kernel, 0.0);
    conv1_b.assign(config.conv1_filters, 0.0);
    conv2_w.assign(static_cast<size_t>(config.conv2_filters) * config.conv1_filters *
                       config.conv2_kernel, 0.0);
    conv2_b.assign(config.conv2_filters, 0.0);
    fc1_w.assign(static_cast<size_t>(config.fc1_units) * config.conv2_filters * config.length,
                 0.0);
    fc1_b.assign(config.fc1_units, 0.0);
    fc2_w.assign(static_cast<size_t>(config.n_classes) * config.fc1_units, 0.0);
    fc2_b.assign(config.n_classes, 0.0);
}

void MccnnNet::init_weights(uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto fill = [&rng](std::vector<double>& w, int fan_in) {
        double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (double& v : w) v = dist(rng);
    };
    fill(conv1_w, config_.channels * config_.conv1_kernel);
    fill(conv1_b, config_.channels * config_.conv1_kernel);
    fill(conv2_w, config_.conv1_filters * config_.conv2_kernel);
    fill(conv2_b, config_.conv1_filters * config_.conv2_kernel);
    fill(fc1_w, config_.conv2_filters * config_.length);
    fill(fc1_b, config_.conv2_filters * config_.length);
    fill(fc2_w, config_.fc1_units);
    fill(fc2_b, config_.fc1_units);
}

std::vector<std::vector<double>*> MccnnNet::parameter_tensors() {
    return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &fc1_w, &fc1_b, &fc2_w, &fc2_b};
}

std::vector<const std::vector<double>*> MccnnNet::parameter_tensors() const {
    return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &fc1_w, &fc1_b, &fc2_w, &fc2_b};
}

size_t MccnnNet::parameter_count() const {
    size_t n = 0;
    for (const auto* t : parameter_tensors()) n += t->size();
    return n;
}

namespace {

// out[f][t] += sum_c sum_u w[f][c][u] * in[c][t + u - k/2], zero padded.
void conv1d_forward(const double* in, int in_ch, int T, const double* w, const double* b,
                    int out_ch, int kernel, double* out) {
    const int off = kernel / 2;
    for (int f = 0; f < out_ch; ++f) {
        double* row = out + static_cast<size_t>(f) * T;
        std::fill(row, row + T, b[f]);
        for (int c = 0; c < in_ch; ++c) {
            const double* src = in + static_cast<size_t>(c) * T;
            const double* wk = w + (static_cast<size_t>(f) * in_ch + c) * kernel;
            for (int u = 0; u < kernel; ++u) {
                const int shift = u - off;
                const int lo = std::max(0, -shift);
                const int hi = std::min(T, T - shift);
                const double wv = wk[u];
                for (int t = lo; t < hi; ++t) row[t] += wv * src[t + shift];
            }
        }
    }
}

// Accumulates dW/db and (optionally) the gradient w.r.t. the layer input.
void conv1d_backward(const double* in, int in_ch, int T, const double* w, int out_ch,
                     int kernel, const double* d_out, double* d_w, double* d_b,
                     double* d_in) {
    const int off = kernel / 2;
    for (int f = 0; f < out_ch; ++f) {
        const double* drow = d_out + static_cast<size_t>(f) * T;
        double acc_b = 0.0;
        for (int t = 0; t < T; ++t) acc_b += drow[t];
        d_b[f] += acc_b;
        for (int c = 0; c < in_ch; ++c) {
            const double* src = in + static_cast<size_t>(c) * T;
            double* dwk = d_w + (static_cast<size_t>(f) * in_ch + c) * kernel;
            for (int u = 0; u < kernel; ++u) {
                const int shift = u - off;
                const int lo = std::max(0, -shift);
                const int hi = std::min(T, T - shift);
                double acc = 0.0;
                for (int t = lo; t < hi; ++t) acc += drow[t] * src[t + shift];
                dwk[u] += acc;
            }
        }
    }
    if (!d_in) return;
    std::fill(d_in, d_in + static_cast<size_t>(in_ch) * T, 0.0);
    for (int f = 0; f < out_ch; ++f) {
        const double* drow = d_out + static_cast<size_t>(f) * T;
        for (int c = 0; c < in_ch; ++c) {
            double* dst = d_in + static_cast<size_t>(c) * T;
            const double* wk = w + (static_cast<size_t>(f) * in_ch + c) * kernel;
            for (int u = 0; u < kernel; ++u) {
                const int shift = u - off;
                const int lo = std::max(0, -shift);
                const int hi = std::min(T, T - shift);
                const double wv = wk[u];
                for (int t = lo; t < hi; ++t) dst[t + shift] += wv * drow[t];
            }
        }
    }
}

void relu_inplace(double* v, size_t n) {
    for (size_t i = 0; i < n; ++i) v[i] = v[i] > 0.0 ? v[i] : 0.0;
}

void softmax_inplace(double* v, int n) {
    double mx = v[0];
    for (int i = 1; i < n; ++i) mx = std::max(mx, v[i]);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        v[i] = std::exp(v[i] - mx);
        sum += v[i];
    }
    for (int i = 0; i < n; ++i) v[i] /= sum;
}

}  // namespace

struct Workspace {
    std::vector<double> conv1_pre, conv1_act;
    std::vector<double> conv2_pre, conv2_act;
    std::vector<double> fc1_pre, fc1_act;
    std::vector<double> logits;
    std::vector<double> d_conv1, d_conv2, d_fc1;
};

Workspace* workspace_create(const MccnnNet& net) {
    const auto& cfg = net.config();
    auto* ws = new Workspace;
    size_t n1 = static_cast<size_t>(cfg.conv1_filters) * cfg.length;
    size_t n2 = static_cast<size_t>(cfg.conv2_filters) * cfg.length;
    ws->conv1_pre.resize(n1);
    ws->conv1_act.resize(n1);
    ws->conv2_pre.resize(n2);
    ws->conv2_act.resize(n2);
    ws->fc1_pre.resize(cfg.fc1_units);
    ws->fc1_act.resize(cfg.fc1_units);
    ws->logits.resize(cfg.n_classes);
    ws->d_conv1.resize(n1);
    ws->d_conv2.resize(n2);
    ws->d_fc1.resize(cfg.fc1_units);
    return ws;
}

void workspace_destroy(Workspace* ws) { delete ws; }

namespace {

void forward_into(const MccnnNet& net, const double* x, Workspace& ws) {
    const auto& cfg = net.config();
    const int T = cfg.length;

    conv1d_forward(x, cfg.channels, T, net.conv1_w.data(), net.conv1_b.data(),
                   cfg.conv1_filters, cfg.conv1_kernel, ws.conv1_pre.data());
    ws.conv1_act = ws.conv1_pre;
    relu_inplace(ws.conv1_act.data(), ws.conv1_act.size());

    conv1d_forward(ws.conv1_act.data(), cfg.conv1_filters, T, net.conv2_w.data(),
                   net.conv2_b.data(), cfg.conv2_filters, cfg.conv2_kernel,
                   ws.conv2_pre.data());
    ws.conv2_act = ws.conv2_pre;
    relu_inplace(ws.conv2_act.data(), ws.conv2_act.size());

    const size_t flat = ws.conv2_act.size();
    for (int h = 0; h < cfg.fc1_units; ++h) {
        const double* row = net.fc1_w.data() + static_cast<size_t>(h) * flat;
        double acc = net.fc1_b[h];
        for (size_t i = 0; i < flat; ++i) acc += row[i] * ws.conv2_act[i];
        ws.fc1_pre[h] = acc;
        ws.fc1_act[h] = acc > 0.0 ? acc : 0.0;
    }

    for (int o = 0; o < cfg.n_classes; ++o) {
        const double* row = net.fc2_w.data() + static_cast<size_t>(o) * cfg.fc1_units;
        double acc = net.fc2_b[o];
        for (int h = 0; h < cfg.fc1_units; ++h) acc += row[h] * ws.fc1_act[h];
        ws.logits[o] = acc;
    }
    softmax_inplace(ws.logits.data(), cfg.n_classes);
}

}  // namespace

std::vector<double> MccnnNet::forward(const std::vector<double>& channels) const {
    if (channels.size() != static_cast<size_t>(config_.channels) * config_.length)
        throw Error(ErrorCode::shape_mismatch, "input length does not match net configuration");
    Workspace* ws = workspace_create(*this);
    forward_into(*this, channels.data(), *ws);
    std::vector<double> probs = ws->logits;
    workspace_destroy(ws);
    return probs;
}

int MccnnNet::predict(const std::vector<double>& channels) const {
    std::vector<double> probs = forward(channels);
    return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

Gradients::Gradients(const MccnnNet& net)
    : conv1_w(net.conv1_w.size(), 0.0),
      conv1_b(net.conv1_b.size(), 0.0),
      conv2_w(net.conv2_w.size(), 0.0),
      conv2_b(net.conv2_b.size(), 0.0),
      fc1_w(net.fc1_w.size(), 0.0),
      fc1_b(net.fc1_b.size(), 0.0),
      fc2_w(net.fc2_w.size(), 0.0),
      fc2_b(net.fc2_b.size(), 0.0) {}

void Gradients::zero() {
    for (auto* t : tensors()) std::fill(t->begin(), t->end(), 0.0);
}

void Gradients::add(const Gradients& other) {
    auto mine = tensors();
    auto theirs = const_cast<Gradients&>(other).tensors();
    for (size_t i = 0; i < mine.size(); ++i)
        for (size_t j = 0; j < mine[i]->size(); ++j) (*mine[i])[j] += (*theirs[i])[j];
}

std::vector<std::vector<double>*> Gradients::tensors() {
    return {&conv1_w, &conv1_b, &conv2_w, &conv2_b, &fc1_w, &fc1_b, &fc2_w, &fc2_b};
}

double backprop_sample(const MccnnNet& net, const double* channels, int label,
                       Gradients& grads, Workspace& ws) {
    const auto& cfg = net.config();
    const int T = cfg.length;
    forward_into(net, channels, ws);

    double loss = -std::log(std::max(ws.logits[label], 1e-300));

    // Softmax + cross-entropy collapse to probs - onehot at the logits.
    std::vector<double> d_logits = ws.logits;
    d_logits[label] -= 1.0;

    const size_t flat = ws.conv2_act.size();
    std::fill(ws.d_fc1.begin(), ws.d_fc1.end(), 0.0);
    for (int o = 0; o < cfg.n_classes; ++o) {
        const double g = d_logits[o];
        grads.fc2_b[o] += g;
        double* dwrow = grads.fc2_w.data() + static_cast<size_t>(o) * cfg.fc1_units;
        const double* wrow = net.fc2_w.data() + static_cast<size_t>(o) * cfg.fc1_units;
        for (int h = 0; h < cfg.fc1_units; ++h) {
            dwrow[h] += g * ws.fc1_act[h];
            ws.d_fc1[h] += g * wrow[h];
        }
    }
    for (int h = 0; h < cfg.fc1_units; ++h)
        if (ws.fc1_pre[h] <= 0.0) ws.d_fc1[h] = 0.0;

    std::fill(ws.d_conv2.begin(), ws.d_conv2.end(), 0.0);
    for (int h = 0; h < cfg.fc1_units; ++h) {
        const double g = ws.d_fc1[h];
        if (g == 0.0) continue;
        grads.fc1_b[h] += g;
        double* dwrow = grads.fc1_w.data() + static_cast<size_t>(h) * flat;
        const double* wrow = net.fc1_w.data() + static_cast<size_t>(h) * flat;
        for (size_t i = 0; i < flat; ++i) {
            dwrow[i] += g * ws.conv2_act[i];
            ws.d_conv2[i] += g * wrow[i];
        }
    }
    for (size_t i = 0; i < flat; ++i)
        if (ws.conv2_pre[i] <= 0.0) ws.d_conv2[i] = 0.0;

    conv1d_backward(ws.conv1_act.data(), cfg.conv1_filters, T, net.conv2_w.data(),
                    cfg.conv2_filters, cfg.conv2_kernel, ws.d_conv2.data(),
                    grads.conv2_w.data(), grads.conv2_b.data(), ws.d_conv1.data());
    for (size_t i = 0; i < ws.d_conv1.size(); ++i)
        if (ws.conv1_pre[i] <= 0.0) ws.d_conv1[i] = 0.0;

    conv1d_backward(channels, cfg.channels, T, net.conv1_w.data(), cfg.conv1_filters,
                    cfg.conv1_kernel, ws.d_conv1.data(), grads.conv1_w.data(),
                    grads.conv1_b.data(), nullptr);
    return loss;
}

namespace {

class Adam {
public:
    Adam(size_t n, const TrainConfig& cfg)
        : m_(n, 0.0), v_(n, 0.0), beta1_(cfg.adam_beta1), beta2_(cfg.adam_beta2),
          eps_(cfg.adam_epsilon), lr_(cfg.learning_rate) {}

    void step(std::vector<std::vector<double>*>& params,
              std::vector<std::vector<double>*>& grads, double scale) {
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, t_);
        const double bc2 = 1.0 - std::pow(beta2_, t_);
        size_t base = 0;
        for (size_t ti = 0; ti < params.size(); ++ti) {
            auto& p = *params[ti];
            auto& g = *grads[ti];
            for (size_t i = 0; i < p.size(); ++i) {
                double gi = g[i] * scale;
                double& m = m_[base + i];
                double& v = v_[base + i];
                m = beta1_ * m + (1.0 - beta1_) * gi;
                v = beta2_ * v + (1.0 - beta2_) * gi * gi;
                p[i] -= lr_ * (m / bc1) / (std::sqrt(v / bc2) + eps_);
            }
            base += p.size();
        }
    }

private:
    std::vector<double> m_, v_;
    double beta1_, beta2_, eps_, lr_;
    int t_ = 0;
};

}  // namespace

TrainResult train(MccnnNet& net, const Dataset& data, const std::vector<int>& train_indices,
                  const TrainConfig& config) {
    const int n_classes = net.config().n_classes;
    if (config.batch_size % n_classes != 0)
        throw Error(ErrorCode::invalid_config,
                    "batch size must be divisible by the class count for balanced batching");
    const int per_class = config.batch_size / n_classes;

    std::vector<std::vector<int>> pools(n_classes);
    for (int i : train_indices) {
        int label = data.samples[i].label;
        if (label < 0 || label >= n_classes)
            throw Error(ErrorCode::bad_input, "sample label outside class range");
        pools[label].push_back(i);
    }
    for (int c = 0; c < n_classes; ++c)
        if (pools[c].empty())
            throw Error(ErrorCode::missing_class,
                        "class " + std::to_string(c) + " has no training samples");

    std::mt19937_64 rng(config.seed);
    for (auto& pool : pools) std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<size_t> cursor(n_classes, 0);
    auto draw = [&](int cls) {
        auto& pool = pools[cls];
        if (cursor[cls] >= pool.size()) {
            std::shuffle(pool.begin(), pool.end(), rng);
            cursor[cls] = 0;
        }
        return pool[cursor[cls]++];
    };

    int n_threads = config.threads > 0
                        ? config.threads
                        : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<int>(n_threads, config.batch_size);

    std::vector<Gradients> thread_grads;
    std::vector<Workspace*> thread_ws;
    for (int i = 0; i < n_threads; ++i) {
        thread_grads.emplace_back(net);
        thread_ws.push_back(workspace_create(net));
    }

    Adam adam(net.parameter_count(), config);
    auto params = net.parameter_tensors();

    const int steps_per_epoch =
        std::max<int>(1, static_cast<int>(train_indices.size() + config.batch_size - 1) /
                             config.batch_size);

    TrainResult result;
    std::vector<int> batch(config.batch_size);
    std::vector<double> thread_loss(n_threads);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        double epoch_loss = 0.0;
        for (int step = 0; step < steps_per_epoch; ++step) {
            int bi = 0;
            for (int c = 0; c < n_classes; ++c)
                for (int r = 0; r < per_class; ++r) batch[bi++] = draw(c);

            // Deterministic parallelism: fixed partition by position, merge
            // in thread order.
            auto worker = [&](int tid) {
                thread_grads[tid].zero();
                double loss = 0.0;
                for (int i = tid; i < config.batch_size; i += n_threads) {
                    const auto& sample = data.samples[batch[i]];
                    loss += backprop_sample(net, sample.channels.data(), sample.label,
                                            thread_grads[tid], *thread_ws[tid]);
                }
                thread_loss[tid] = loss;
            };
            if (n_threads == 1) {
                worker(0);
            } else {
                std::vector<std::thread> threads;
                for (int tid = 1; tid < n_threads; ++tid) threads.emplace_back(worker, tid);
                worker(0);
                for (auto& th : threads) th.join();
            }
            for (int tid = 1; tid < n_threads; ++tid) thread_grads[0].add(thread_grads[tid]);

            auto grads = thread_grads[0].tensors();
            adam.step(params, grads, 1.0 / config.batch_size);

            double batch_loss = 0.0;
            for (int tid = 0; tid < n_threads; ++tid) batch_loss += thread_loss[tid];
            epoch_loss += batch_loss / config.batch_size;
        }
        epoch_loss /= steps_per_epoch;
        result.loss_curve.push_back(epoch_loss);
        result.epochs_run = epoch + 1;
        if (config.early_stop_loss > 0.0 && epoch_loss < config.early_stop_loss) {
            result.early_stopped = true;
            break;
        }
    }

    for (auto* ws : thread_ws) workspace_destroy(ws);
    return result;
}

std::vector<int> predict_all(const MccnnNet& net, const Dataset& data,
                             const std::vector<int>& indices) {
    std::vector<int> preds;
    preds.reserve(indices.size());
    Workspace* ws = workspace_create(net);
    for (int i : indices) {
        forward_into(net, data.samples[i].channels.data(), *ws);
        preds.push_back(static_cast<int>(
            std::max_element(ws->logits.begin(), ws->logits.end()) - ws->logits.begin()));
    }
    workspace_destroy(ws);
    return preds;
}

double balanced_accuracy(const std::vector<int>& predictions, const std::vector<int>& labels,
                         int n_classes, std::vector<int>* excluded) {
    std::vector<int> correct(n_classes, 0), total(n_classes, 0);
    for (size_t i = 0; i < labels.size(); ++i) {
        ++total[labels[i]];
        if (predictions[i] == labels[i]) ++correct[labels[i]];
    }
    double sum = 0.0;
    int present = 0;
    for (int c = 0; c < n_classes; ++c) {
        if (total[c] == 0) {
            if (excluded) excluded->push_back(c);
            continue;
        }
        sum += static_cast<double>(correct[c]) / total[c];
        ++present;
    }
    return present > 0 ? sum / present : 0.0;
}

double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (labels.empty()) return 0.0;
    int correct = 0;
    for (size_t i = 0; i < labels.size(); ++i)
        if (predictions[i] == labels[i]) ++correct;
    return static_cast<double>(correct) / labels.size();
}

std::vector<std::vector<double>> confusion_matrix(const std::vector<int>& predictions,
                                                  const std::vector<int>& labels,
                                                  int n_classes, bool normalize_rows) {
    std::vector<std::vector<double>> m(n_classes, std::vector<double>(n_classes, 0.0));
    for (size_t i = 0; i < labels.size(); ++i) m[labels[i]][predictions[i]] += 1.0;
    if (normalize_rows) {
        for (auto& row : m) {
            double sum = 0.0;
            for (double v : row) sum += v;
            if (sum > 0.0)
                for (double& v : row) v /= sum;
        }
    }
    return m;
}

std::vector<std::vector<int>> kfold_split(int n_samples, int k, uint64_t seed) {
    if (k < 2 || k > n_samples)
        throw Error(ErrorCode::invalid_k, "k must lie in [2, n_samples]");
    std::vector<int> order(n_samples);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<std::vector<int>> folds(k);
    int base = n_samples / k;
    int extra = n_samples % k;
    int pos = 0;
    for (int f = 0; f < k; ++f) {
        int size = base + (f < extra ? 1 : 0);
        folds[f].assign(order.begin() + pos, order.begin() + pos + size);
        pos += size;
    }
    return folds;
}

Dataset relabel(const Dataset& data, const std::vector<int>& mapping, int n_new_classes) {
    Dataset out = data;
    out.n_classes = n_new_classes;
    for (auto& sample : out.samples) {
        if (sample.label < 0 || sample.label >= static_cast<int>(mapping.size()))
            throw Error(ErrorCode::bad_input, "label outside mapping range");
        sample.label = mapping[sample.label];
    }
    return out;
}

}  // namespace gamerecon::mccnn
