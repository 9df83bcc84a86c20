#include "wrenchval/nn/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "wrenchval/errors.hpp"
#include "wrenchval/random.hpp"

namespace wrenchval::nn {

using nlohmann::json;

void TrainConfig::validate() const {
    if (!(adam.lr > 0)) throw DataError("learning rate must be positive");
    if (batch_size < 1) throw DataError("batch_size must be >= 1");
    if (epochs < 1) throw DataError("epochs must be >= 1");
    if (!(adam.beta1 >= 0 && adam.beta1 < 1 && adam.beta2 >= 0 && adam.beta2 < 1))
        throw DataError("adam betas must lie in [0,1)");
}

json TrainConfig::to_json() const {
    return json{{"optimizer",
                 {{"kind", "adamw"}, {"lr", adam.lr}, {"beta1", adam.beta1}, {"beta2", adam.beta2},
                  {"eps", adam.eps}, {"weight_decay", adam.weight_decay}}},
                {"batch_size", batch_size},
                {"epochs", epochs},
                {"patience", patience},
                {"seed", seed}};
}

TrainConfig TrainConfig::from_json(const json& j) {
    TrainConfig c;
    try {
        if (j.contains("optimizer")) {
            const auto& o = j.at("optimizer");
            c.adam.lr = o.value("lr", c.adam.lr);
            c.adam.beta1 = o.value("beta1", c.adam.beta1);
            c.adam.beta2 = o.value("beta2", c.adam.beta2);
            c.adam.eps = o.value("eps", c.adam.eps);
            c.adam.weight_decay = o.value("weight_decay", c.adam.weight_decay);
        }
        c.batch_size = j.value("batch_size", c.batch_size);
        c.epochs = j.value("epochs", c.epochs);
        c.patience = j.value("patience", c.patience);
        c.seed = j.value("seed", c.seed);
    } catch (const json::exception& e) {
        throw DataError(std::string("invalid training config: ") + e.what());
    }
    c.validate();
    return c;
}

namespace {

struct AdamState {
    ParamSet<float> m, v;
    std::int64_t step = 0;
};

void adam_step(ParamSet<float>& params, const ParamSet<float>& grads, AdamState& state,
               const AdamConfig& cfg) {
    state.step++;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (auto& [name, p] : params.tensors) {
        const TensorT<float>& g = grads.tensors.at(name);
        TensorT<float>& m = state.m.tensors[name];
        TensorT<float>& v = state.v.tensors[name];
        if (m.size() == 0) m = TensorT<float>(p.shape());
        if (v.size() == 0) v = TensorT<float>(p.shape());
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double gi = g[i];
            const double mi = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
            const double vi = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gi * gi;
            m[i] = static_cast<float>(mi);
            v[i] = static_cast<float>(vi);
            p[i] -= static_cast<float>(cfg.lr * ((mi / bc1) / (std::sqrt(vi / bc2) + cfg.eps) +
                                                  cfg.weight_decay * p[i]));
        }
    }
}

void accumulate(ParamSet<float>& into, const ParamSet<float>& grads) {
    for (const auto& [name, g] : grads.tensors) {
        TensorT<float>& acc = into.tensors[name];
        if (acc.size() == 0) acc = TensorT<float>(g.shape());
        for (std::size_t i = 0; i < g.size(); ++i) acc[i] += g[i];
    }
}

void scale(ParamSet<float>& grads, float factor) {
    for (auto& [name, g] : grads.tensors)
        for (std::size_t i = 0; i < g.size(); ++i) g[i] *= factor;
}

}  // namespace

EvalStats evaluate(const Model& model, const std::vector<Sample>& samples) {
    EvalStats stats{ConfusionMatrix(model.spec.n_classes()), 0.0};
    for (const auto& s : samples) {
        const TensorF logits =
            forward<float>(model.spec, model.params, s.inputs, RunMode::Eval, nullptr, nullptr);
        stats.mean_loss += softmax_cross_entropy(logits, s.class_id, static_cast<TensorF*>(nullptr));
        int best = 0;
        for (std::size_t i = 1; i < logits.size(); ++i)
            if (logits[i] > logits[best]) best = static_cast<int>(i);
        stats.cm.add(s.class_id, best);
    }
    if (!samples.empty()) stats.mean_loss /= static_cast<double>(samples.size());
    return stats;
}

TrainResult train(Model& model, const std::vector<Sample>& train_set,
                  const std::vector<Sample>& val_set, const TrainConfig& cfg) {
    cfg.validate();
    if (train_set.empty()) throw DataError("training set is empty");
    for (const auto& s : val_set)
        if (s.augmented) throw DataError("augmented record '" + s.record_id + "' in validation set");
    for (const auto& s : train_set)
        if (s.class_id < 0 || static_cast<std::size_t>(s.class_id) >= model.spec.n_classes())
            throw DataError("sample '" + s.record_id + "' class out of range");

    auto shuffle_rng = make_rng(cfg.seed, 0x7EA1);
    auto dropout_rng = make_rng(cfg.seed, 0xD20F);

    AdamState adam;
    TrainResult result;
    ParamSet<float> best_params = model.params;
    int stale_epochs = 0;

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            ParamSet<float> batch_grads;
            for (std::size_t k = start; k < stop; ++k) {
                const Sample& s = train_set[order[k]];
                ForwardCache<float> cache;
                const TensorF logits = forward<float>(model.spec, model.params, s.inputs,
                                                      RunMode::Train, &dropout_rng, &cache);
                TensorF dlogits;
                epoch_loss += softmax_cross_entropy(logits, s.class_id, &dlogits);
                Gradients<float> g = backward<float>(model.spec, model.params, cache, dlogits);
                accumulate(batch_grads, g.params);
            }
            scale(batch_grads, 1.0f / static_cast<float>(stop - start));
            adam_step(model.params, batch_grads, adam, cfg.adam);
        }
        epoch_loss /= static_cast<double>(order.size());

        if (!std::isfinite(epoch_loss))
            throw NumericError("training diverged (non-finite loss) at epoch " + std::to_string(epoch) +
                               "; last finite epoch " + std::to_string(epoch - 1));

        EpochStats es;
        es.epoch = epoch;
        es.train_loss = epoch_loss;
        if (!val_set.empty()) {
            const EvalStats val = evaluate(model, val_set);
            es.val_loss = val.mean_loss;
            es.val_macro_f1 = f1_scores(val.cm).macro;
        }
        result.history.push_back(es);

        if (val_set.empty()) {
            result.best_epoch = epoch;
            best_params = model.params;
            continue;
        }
        // ties refresh the snapshot: at equal validation F1 a later epoch has
        // had more weight-decay cleanup
        if (result.best_epoch < 0 || es.val_macro_f1 >= result.best_val_f1) {
            result.best_epoch = epoch;
            result.best_val_f1 = es.val_macro_f1;
            best_params = model.params;
            stale_epochs = 0;
        } else if (cfg.patience > 0 && ++stale_epochs >= cfg.patience) {
            break;
        }
    }

    model.params = std::move(best_params);
    return result;
}

void write_history_csv(const std::vector<EpochStats>& history, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write history: " + path.string());
    out << "epoch,train_loss,val_loss,val_macro_f1\n";
    char buf[128];
    for (const auto& e : history) {
        std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g\n", e.epoch, e.train_loss, e.val_loss,
                      e.val_macro_f1);
        out << buf;
    }
    if (!out) throw DataError("history write failed: " + path.string());
}

}  // namespace wrenchval::nn
