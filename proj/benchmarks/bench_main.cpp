#include <random>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include <blockscope/circumvent.hpp>
#include <blockscope/classifier.hpp>
#include <blockscope/digest.hpp>
#include <blockscope/dns_wire.hpp>
#include <blockscope/emulator.hpp>
#include <blockscope/report.hpp>
#include <blockscope/serialize.hpp>
#include <blockscope/url.hpp>

using namespace blockscope;

namespace {

std::vector<std::string> url_corpus(std::size_t n) {
    std::mt19937_64 rng(7);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back("http://www.site" + std::to_string(rng() % 100000) + ".example/watch?v=" +
                      std::to_string(rng()));
    return out;
}

std::vector<Verdict> verdicts(std::size_t n) {
    std::vector<Verdict> out;
    for (std::size_t i = 0; i < n; ++i) {
        Verdict v;
        v.target = parse_target("http://s" + std::to_string(i) + ".example/");
        if (i % 3 == 0) v.mechanisms = {Mechanism::DnsInjection, Mechanism::Http302Redirect};
        else if (i % 7 == 0) v.mechanisms = {Mechanism::Http302Redirect};
        v.clean = v.mechanisms.empty();
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace

static void BM_ParseTarget(benchmark::State& state) {
    const auto corpus = url_corpus(1024);
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(parse_target(corpus[i++ & 1023]));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ParseTarget);

static void BM_Coralize(benchmark::State& state) {
    const auto t = parse_target("http://www.youtube.com/watch?v=12345");
    for (auto _ : state) benchmark::DoNotOptimize(strip_coral(coralize(t)));
}
BENCHMARK(BM_Coralize);

static void BM_DnsEncodeQuery(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(dns::encode_query(0x1234, "www.youtube.com"));
}
BENCHMARK(BM_DnsEncodeQuery);

static void BM_DnsDecodeResponse(benchmark::State& state) {
    dns::Message m;
    m.id = 7;
    m.response = true;
    m.questions = {{"www.youtube.com"}};
    for (int i = 0; i < state.range(0); ++i)
        m.answers.push_back({"www.youtube.com", 300, Ipv4Address(173, 194, 43, static_cast<std::uint8_t>(i))});
    const auto wire = dns::encode(m);
    for (auto _ : state) benchmark::DoNotOptimize(dns::decode(wire));
}
BENCHMARK(BM_DnsDecodeResponse)->Arg(1)->Arg(8);

static void BM_HandleDnsBlocked(benchmark::State& state) {
    CensorPolicy p;
    p.generation = Generation::Isp302;
    for (int i = 0; i < 200; ++i) {
        p.dns_rules.push_back("site" + std::to_string(i) + ".pk");
        p.http_host_rules.push_back("site" + std::to_string(i) + ".pk");
    }
    const auto zone = OriginZone::with_defaults();
    const auto query = dns::encode_query(1, "site150.pk");
    const auto& resolver = p.resolver_map[5];
    for (auto _ : state) benchmark::DoNotOptimize(handle_dns(p, zone, query, resolver));
}
BENCHMARK(BM_HandleDnsBlocked);

static void BM_ClassifyHttp(benchmark::State& state) {
    HttpObservation obs;
    obs.request_host = "youtube.com";
    obs.request_uri = "/";
    obs.status = 200;
    obs.last_modified = "Fri, 19 Apr 2013 00:00:00 GMT";
    obs.body_excerpt = default_warning_body();
    obs.body_digest = sha256_hex(obs.body_excerpt);
    FingerprintSet fp;
    fp.warning_excerpt_patterns = {"blocked", "PTA"};
    for (auto _ : state) benchmark::DoNotOptimize(classify_http(obs, fp, std::nullopt));
}
BENCHMARK(BM_ClassifyHttp);

static void BM_Aggregate(benchmark::State& state) {
    const auto v = verdicts(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(aggregate(v, v.size()));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Aggregate)->Arg(307)->Arg(10000);

static void BM_EncodeVerdicts(benchmark::State& state) {
    const auto v = verdicts(307);
    for (auto _ : state) benchmark::DoNotOptimize(io::encode(v));
}
BENCHMARK(BM_EncodeVerdicts);
BENCHMARK_MAIN();
