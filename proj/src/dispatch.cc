// Copyright 2026 The Collapse Lab Authors
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

#include "collapse_lab/dispatch.h"

#include "collapse_lab/errors.h"
#include "collapse_lab/experiments.h"

namespace collapse_lab {

namespace {

CollapseParams engine_params(const RunConfig &c) {
    CollapseParams p;
    p.delta = c.real("engine.delta");
    p.tau_step = c.real("engine.tau_step");
    try {
        p.validate();
    } catch (const InputError &e) {
        throw ConfigError("engine", e.what());
    }
    return p;
}

SettingsQuartet quartet_of(const RunConfig &c) {
    return {c.real("chsh.a"), c.real("chsh.a_prime"), c.real("chsh.b"), c.real("chsh.b_prime")};
}

LhvModel lhv_model_of(const RunConfig &c) {
    std::string name = c.text("lhv.model");
    if (name == "sign-cos") {
        return lhv::sign_cos();
    }
    if (name == "constant") {
        return lhv::constant();
    }
    if (name == "fair-coin") {
        return lhv::fair_coin();
    }
    return lhv::random_model(c.integer("lhv.model_seed"));
}

ExperimentReport run(const RunConfig &c) {
    const std::string &e = c.experiment();
    uint64_t seed = c.seed();
    uint64_t runs = c.runs();
    if (runs == 0) {
        throw ConfigError("runs", "must be positive");
    }
    if (e == "born") {
        return born_convergence_experiment(c.reals("born.weights"), runs, engine_params(c).delta, seed, c.threads());
    }
    if (e == "chsh-quantum" || e == "nosignal") {
        QuantumRunOptions opts;
        opts.params = engine_params(c);
        opts.sampler = c.text("chsh.sampler") == "born" ? Sampler::direct_born : Sampler::engine;
        opts.workers = c.threads();
        ExperimentReport r = quantum_chsh_run(quartet_of(c), runs, opts, seed);
        if (e == "nosignal") {
            r.experiment = e;
            r.statistics = recompute_statistics(r);
        }
        return r;
    }
    if (e == "chsh-lhv") {
        return lhv_chsh_report(lhv_model_of(c), quartet_of(c), runs, seed, c.threads());
    }
    if (e == "order-invariance") {
        OrderInvarianceConfig oc;
        oc.a = c.real("order.a");
        oc.b = c.real("order.b");
        oc.preparation = c.text("order.preparation") == "product" ? Preparation::product : Preparation::singlet;
        oc.params = engine_params(c);
        oc.workers = c.threads();
        return order_invariance_report(oc, runs, seed);
    }
    if (e == "conservation") {
        ConservationConfig cc;
        cc.reflectivity = c.real("conservation.reflectivity");
        if (!(cc.reflectivity >= 0.0 && cc.reflectivity <= 1.0)) {
            throw ConfigError("conservation.reflectivity", "must lie in [0, 1]");
        }
        cc.entangled = c.flag("conservation.entangled");
        cc.params = engine_params(c);
        cc.workers = c.threads();
        return conservation_experiment(runs, cc, seed);
    }
    if (e == "collapse-trace") {
        CollapseTraceConfig tc;
        tc.w0 = c.real("trace.w0");
        if (!(tc.w0 >= 0.0 && tc.w0 <= 1.0)) {
            throw ConfigError("trace.w0", "must lie in [0, 1]");
        }
        tc.physical = c.flag("trace.physical");
        tc.params = engine_params(c);
        return collapse_trace_experiment(runs, tc, seed);
    }
    throw ConfigError("experiment", "unknown experiment '" + e + "'");
}

}  // namespace

ExperimentReport dispatch(const RunConfig &config) {
    ExperimentReport report = run(config);
    report.experiment = config.experiment();
    report.seed = config.seed();
    report.fingerprint = config.fingerprint();
    return report;
}

int exit_code_for(const std::exception &e) {
    if (dynamic_cast<const ConfigError *>(&e) || dynamic_cast<const InputError *>(&e)) {
        return kExitConfig;
    }
    if (dynamic_cast<const IoError *>(&e)) {
        return kExitIo;
    }
    return kExitNumerical;
}

}  // namespace collapse_lab
