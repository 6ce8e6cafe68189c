#include <benchmark/benchmark.h>

#include "swnc/codec.hpp"
#include "swnc/gf256.hpp"
#include "swnc/protocols.hpp"
#include "swnc/random.hpp"
#include "swnc/recoder.hpp"

namespace {

using namespace swnc;

Bytes random_bytes(Rng& rng, std::size_t n) {
  Bytes b(n);
  for (auto& x : b) x = rng.next_byte();
  return b;
}

void BM_MulAddRegion(benchmark::State& state) {
  Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  Bytes dst = random_bytes(rng, n), src = random_bytes(rng, n);
  const auto c = rng.nonzero_coefficient();
  for (auto _ : state) {
    gf256::mul_add_region(dst, src, c);
    benchmark::DoNotOptimize(dst.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_MulAddRegion)->Arg(100)->Arg(1500)->Arg(65536);

void BM_ScaleRegion(benchmark::State& state) {
  Rng rng(2);
  Bytes data = random_bytes(rng, static_cast<std::size_t>(state.range(0)));
  const auto c = rng.nonzero_coefficient();
  for (auto _ : state) {
    gf256::scale_region(data, c);
    benchmark::DoNotOptimize(data.data());
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_ScaleRegion)->Arg(1500);

// Encodes a whole flow over a lossless link and decodes it, repairs included.
void BM_EncodeDecodeFlow(benchmark::State& state) {
  const auto packets = static_cast<std::uint32_t>(state.range(0));
  Rng payloads(3);
  std::vector<Bytes> flow;
  for (std::uint32_t i = 0; i < packets; ++i) flow.push_back(random_bytes(payloads, 100));
  for (auto _ : state) {
    Rng rng(4);
    Encoder enc({CodeRate{4, 5}, 64, OverflowPolicy::kHoldAndRepair, 100});
    Decoder dec(100);
    std::uint32_t next = 0;
    while (dec.fully_decoded() < packets) {
      if (enc.repair_due() && enc.window_empty()) enc.skip_repairs();
      if (!enc.repair_due() && next < packets &&
          enc.push({next, flow[next]}) == PushResult::kAccepted)
        ++next;
      dec.consume(enc.repair_due() || enc.has_fresh_packet() ? enc.emit(rng) : enc.emit_repair(rng));
      enc.apply_feedback({dec.fully_decoded(), dec.partial_rank()});
    }
    benchmark::DoNotOptimize(dec.fully_decoded());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * packets);
}
BENCHMARK(BM_EncodeDecodeFlow)->Arg(100)->Arg(1000);

void BM_RecoderConsumeEmit(benchmark::State& state) {
  Rng payloads(5);
  Encoder enc({CodeRate{1, 1}, 255, OverflowPolicy::kHoldAndRepair, 100});
  std::vector<CodedPacket> input;
  Rng src_rng(6);
  for (std::uint32_t i = 0; i < 64; ++i) {
    enc.push({i, random_bytes(payloads, 100)});
    input.push_back(enc.emit(src_rng));
  }
  for (auto _ : state) {
    Recoder rec({CodeRate{3, 4}, 255, 100, 255, OverflowPolicy::kDropOldest});
    Rng rng(7);
    for (const auto& p : input) {
      rec.consume(p);
      benchmark::DoNotOptimize(rec.emit(rng));
    }
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 64);
}
BENCHMARK(BM_RecoderConsumeEmit);

void BM_Scenario(benchmark::State& state) {
  ScenarioConfig c;
  c.scenario = static_cast<Scenario>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_scenario(c).metrics);
    ++c.seed;
  }
  state.SetLabel(to_string(c.scenario));
}
BENCHMARK(BM_Scenario)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
