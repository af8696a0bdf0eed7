// Microbenchmarks for the hot paths: pulse shaping, the receiver DSP chain,
// fingerprint imaging, and the neural-network forward pass.

#include <benchmark/benchmark.h>

#include <vector>

#include "rfveil/autoencoder.hpp"
#include "rfveil/classifier.hpp"
#include "rfveil/imaging.hpp"
#include "rfveil/receiver.hpp"
#include "rfveil/rng.hpp"
#include "rfveil/signal.hpp"

namespace {

rfveil::SampleBuffer modulated_buffer(std::size_t n_symbols) {
    const rfveil::Message msg = rfveil::generate_message((n_symbols + 2047) / 2048);
    rfveil::ModulationParams params;
    return rfveil::modulate_bpsk(msg, params);
}

void BM_PulseShaping(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const std::vector<double> taps = rfveil::rrc_taps(4, 0.35, 11);
    rfveil::Rng rng(1);
    std::vector<double> symbols(n);
    for (auto& s : symbols) s = rng.uniform() < 0.5 ? 1.0 : -1.0;
    for (auto _ : state) {
        auto out = rfveil::shape_symbols(symbols, taps, 4, 1.0);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_PulseShaping)->Arg(4096)->Arg(65536);

void BM_MatchedFilter(benchmark::State& state) {
    const auto buf = modulated_buffer(static_cast<std::size_t>(state.range(0)));
    const std::vector<double> taps = rfveil::rrc_taps(4, 0.35, 11);
    for (auto _ : state) {
        auto out = rfveil::matched_filter(buf, taps);
        benchmark::DoNotOptimize(out.samples.data());
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(buf.samples.size()));
}
BENCHMARK(BM_MatchedFilter)->Arg(4096)->Arg(65536);

void BM_TimingRecovery(benchmark::State& state) {
    const auto buf = modulated_buffer(static_cast<std::size_t>(state.range(0)));
    const auto filtered = rfveil::matched_filter(buf, rfveil::rrc_taps(4, 0.35, 11));
    for (auto _ : state) {
        auto out = rfveil::mm_timing_recovery(filtered, 4);
        benchmark::DoNotOptimize(out.symbols.data());
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(filtered.samples.size()));
}
BENCHMARK(BM_TimingRecovery)->Arg(65536);

void BM_ReceiverChain(benchmark::State& state) {
    const std::size_t n_symbols = static_cast<std::size_t>(state.range(0));
    const rfveil::Message msg = rfveil::generate_message((n_symbols + 2047) / 2048);
    rfveil::ModulationParams params;
    const rfveil::SampleBuffer buf = rfveil::modulate_bpsk(msg, params);
    const rfveil::ReceiverParams rp;
    for (auto _ : state) {
        auto out = rfveil::run_receiver(buf, rp, msg);
        benchmark::DoNotOptimize(out.ber);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n_symbols));
}
BENCHMARK(BM_ReceiverChain)->Arg(16384)->Unit(benchmark::kMillisecond);

void BM_IqToImage(benchmark::State& state) {
    rfveil::Rng rng(3);
    std::vector<rfveil::Complex> window(5000);
    for (auto& z : window) z = rng.complex_gaussian(1.0);
    const rfveil::PlaneBounds bounds;
    for (auto _ : state) {
        auto img = rfveil::iq_to_image(window, static_cast<int>(state.range(0)), bounds);
        benchmark::DoNotOptimize(img.pixels.data());
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(window.size()));
}
BENCHMARK(BM_IqToImage)->Arg(64)->Arg(224);

void BM_ClassifierForward(benchmark::State& state) {
    rfveil::ClassifierConfig cfg;
    cfg.image_size = static_cast<int>(state.range(0));
    cfg.n_classes = 5;
    rfveil::Net net = rfveil::build_classifier_net(cfg);
    rfveil::Rng rng(4);
    net.init_weights(rng);
    std::vector<double> input(static_cast<std::size_t>(cfg.image_size) * cfg.image_size);
    for (auto& v : input) v = rng.uniform();
    for (auto _ : state) {
        auto out = net.forward(input);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_ClassifierForward)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_ClassifierTrainStep(benchmark::State& state) {
    rfveil::ClassifierConfig cfg;
    cfg.image_size = 64;
    cfg.n_classes = 5;
    rfveil::Net net = rfveil::build_classifier_net(cfg);
    rfveil::Rng rng(5);
    net.init_weights(rng);
    rfveil::SgdMomentum opt(0.01, 0.9);
    std::vector<double> input(64 * 64);
    for (auto& v : input) v = rng.uniform();
    for (auto _ : state) {
        net.zero_grads();
        auto logits = net.forward(input);
        auto probs = rfveil::softmax(logits);
        probs[0] -= 1.0;  // dCE/dlogits for label 0
        net.backward(probs);
        auto blocks = net.param_blocks();
        opt.step(blocks, 1.0);
        benchmark::DoNotOptimize(logits.data());
    }
}
BENCHMARK(BM_ClassifierTrainStep)->Unit(benchmark::kMicrosecond);

void BM_AutoencoderForward(benchmark::State& state) {
    rfveil::AutoencoderConfig cfg;
    cfg.image_size = 64;
    cfg.bottleneck = 64;
    rfveil::Net net = rfveil::build_autoencoder_net(cfg);
    rfveil::Rng rng(6);
    net.init_weights(rng);
    std::vector<double> input(64 * 64);
    for (auto& v : input) v = rng.uniform();
    for (auto _ : state) {
        auto out = net.forward(input);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_AutoencoderForward)->Unit(benchmark::kMicrosecond);

void BM_ComputeBer(benchmark::State& state) {
    const rfveil::Message msg = rfveil::generate_message(64);
    std::vector<std::uint8_t> bits = msg.bits;
    bits[100] ^= 1;  // one error, keeps the alignment search honest
    for (auto _ : state) {
        benchmark::DoNotOptimize(rfveil::compute_ber(bits, msg));
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(bits.size()));
}
BENCHMARK(BM_ComputeBer);

void BM_EstimateSnr(benchmark::State& state) {
    rfveil::Rng rng(7);
    rfveil::SymbolStream s;
    s.timing_converged = s.carrier_converged = true;
    s.symbols.resize(100000);
    for (auto& z : s.symbols)
        z = rfveil::Complex(rng.uniform() < 0.5 ? 1.0 : -1.0, 0.0) +
            rng.complex_gaussian(0.01);
    for (auto _ : state) {
        auto est = rfveil::estimate_snr(s);
        benchmark::DoNotOptimize(est.aggregate_db);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(s.symbols.size()));
}
BENCHMARK(BM_EstimateSnr);

}  // namespace

BENCHMARK_MAIN();
