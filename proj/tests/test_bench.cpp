// Copyright 2026 The TaskForge Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "taskforge/bench/benchmarks.hpp"
#include "taskforge/bench/sweep.hpp"

using namespace taskforge;
using namespace taskforge::bench;

namespace {

RuntimeConfig small_config(sched::SyncMode mode = sched::SyncMode::dtlock)
{
	RuntimeConfig config;
	config.workers = 4;
	config.pin = false;
	config.sync = mode;
	return config;
}

SweepRow row(std::string benchmark, std::string variant, std::size_t block, double perf,
	std::size_t size = 100)
{
	SweepRow r;
	r.benchmark = std::move(benchmark);
	r.variant = std::move(variant);
	r.block_size = block;
	r.perf_metric = perf;
	r.problem_size = size;
	return r;
}

} // namespace

TEST(Sweep, EfficiencyIsRelativeToPeak)
{
	std::vector<SweepRow> rows = {row("chain", "optimized", 16, 10), row("chain", "optimized", 64, 20),
		row("chain", "mutex", 256, 40)};
	apply_efficiency(rows);
	EXPECT_DOUBLE_EQ(rows[0].efficiency, 0.25);
	EXPECT_DOUBLE_EQ(rows[1].efficiency, 0.5);
	EXPECT_DOUBLE_EQ(rows[2].efficiency, 1.0);
}

TEST(Sweep, EfficiencyPeaksAreKeptPerBenchmarkAndSize)
{
	std::vector<SweepRow> rows = {row("chain", "optimized", 16, 10), row("stencil", "optimized", 16, 5),
		row("chain", "optimized", 16, 2, 200), row("chain", "optimized", 64, 4, 200)};
	apply_efficiency(rows);
	EXPECT_DOUBLE_EQ(rows[0].efficiency, 1.0);
	EXPECT_DOUBLE_EQ(rows[1].efficiency, 1.0);
	EXPECT_DOUBLE_EQ(rows[2].efficiency, 0.5);
	EXPECT_DOUBLE_EQ(rows[3].efficiency, 1.0);
	for (const SweepRow &r : rows) {
		EXPECT_GE(r.efficiency, 0.0);
		EXPECT_LE(r.efficiency, 1.0);
	}
}

TEST(Sweep, SampleStandardDeviation)
{
	const std::vector<double> samples = {1, 2, 3, 4, 5};
	// Two-pass reference with the n - 1 denominator.
	const double m = std::accumulate(samples.begin(), samples.end(), 0.0) / 5;
	double ss = 0;
	for (double s : samples)
		ss += (s - m) * (s - m);
	EXPECT_DOUBLE_EQ(mean(samples), 3.0);
	EXPECT_DOUBLE_EQ(sample_stddev(samples), std::sqrt(ss / 4));
	EXPECT_NEAR(sample_stddev(samples), 1.5811388, 1e-6);
	EXPECT_EQ(sample_stddev({7.0}), 0.0);
}

TEST(Sweep, VariantsMapToSchedulerModes)
{
	EXPECT_EQ(find_variant("optimized").sync, sched::SyncMode::dtlock);
	EXPECT_EQ(find_variant("no-dtlock").sync, sched::SyncMode::ptlock);
	EXPECT_EQ(find_variant("mutex").sync, sched::SyncMode::mutex);
	EXPECT_THROW(find_variant("fast"), std::invalid_argument);
}

TEST(Sweep, CsvLayout)
{
	SweepOptions options;
	options.benchmarks = {"spawn_storm"};
	options.problem_sizes = {4096};
	options.block_sizes = {64, 512};
	options.variants = {"optimized", "mutex"};
	options.repetitions = 2;
	options.config = small_config();
	const auto rows = sweep(options);
	ASSERT_EQ(rows.size(), 4u);
	double best = 0;
	for (const SweepRow &r : rows) {
		EXPECT_EQ(r.samples, 2u);
		EXPECT_GT(r.perf_metric, 0.0);
		EXPECT_TRUE(r.last_report.clean());
		best = std::max(best, r.efficiency);
	}
	EXPECT_DOUBLE_EQ(best, 1.0);

	std::ostringstream csv;
	write_csv(csv, rows);
	std::istringstream lines(csv.str());
	std::string line;
	std::getline(lines, line);
	EXPECT_EQ(line, "benchmark,variant,blockSize,workUnitsPerTask,perfMetric,efficiency,stddev,problemSize");
	int count = 0;
	while (std::getline(lines, line)) {
		++count;
		EXPECT_EQ(std::count(line.begin(), line.end(), ','), 7);
		EXPECT_EQ(line.rfind("spawn_storm,", 0), 0u);
	}
	EXPECT_EQ(count, 4);
}

TEST(Sweep, RejectsEmptyBlockList)
{
	SweepOptions options;
	options.benchmarks = {"chain"};
	EXPECT_THROW(sweep(options), std::invalid_argument);
}

TEST(Benchmarks, Names)
{
	EXPECT_EQ(benchmark_names().size(), 5u);
	EXPECT_TRUE(is_benchmark("matmul"));
	EXPECT_FALSE(is_benchmark("fft"));
	EXPECT_EQ(default_problem_size("matmul"), 256u);
}

TEST(Benchmarks, MatmulMatchesSerialProduct)
{
	BenchmarkSpec spec;
	spec.name = "matmul";
	spec.problem_size = 256;
	spec.block_size = 64;
	spec.config = small_config();
	const BenchResult result = run_benchmark(spec);
	EXPECT_EQ(result.tasks_executed, 64u);
	EXPECT_EQ(result.work_units_per_task, 64u * 64u * 64u);
	EXPECT_TRUE(result.report.clean());
	EXPECT_EQ(result.report.tasks_executed, 65u);
}

TEST(Benchmarks, ChainRunsBlocksInOrder)
{
	BenchmarkSpec spec;
	spec.name = "chain";
	spec.problem_size = 1000;
	spec.block_size = 1;
	spec.config = small_config();
	const auto order = chain_execution_order(spec);
	ASSERT_EQ(order.size(), 1000u);
	for (std::size_t i = 0; i < order.size(); ++i)
		ASSERT_EQ(order[i], i);
}

TEST(Benchmarks, WorkIsDeterministic)
{
	EXPECT_EQ(bench::detail::work(5, 0), 5u);
	EXPECT_EQ(bench::detail::work(5, 3), bench::detail::work(bench::detail::work(5, 1), 2));
	EXPECT_NE(bench::detail::work(5, 1), 5u);
	EXPECT_EQ(bench::detail::blocks_of(10, 3), 4u);
}

class EveryBenchmark
	: public ::testing::TestWithParam<std::tuple<std::string, sched::SyncMode>> {};

TEST_P(EveryBenchmark, ValidatesAcrossBlockSizes)
{
	const auto &[name, mode] = GetParam();
	for (std::size_t block : {1, 16, 100, 1024}) {
		BenchmarkSpec spec;
		spec.name = name;
		spec.problem_size = name == "matmul" ? 48 : 3000;
		spec.block_size = block;
		spec.config = small_config(mode);
		BenchResult result;
		ASSERT_NO_THROW(result = run_benchmark(spec)) << name << " block " << block;
		EXPECT_GT(result.perf_metric, 0.0);
		EXPECT_TRUE(result.report.clean());
		EXPECT_EQ(result.report.tasks_executed, result.tasks_executed + 1);
	}
}

INSTANTIATE_TEST_SUITE_P(All, EveryBenchmark,
	::testing::Combine(::testing::Values("spawn_storm", "chain", "stencil", "matmul", "dotsum"),
		::testing::Values(sched::SyncMode::dtlock, sched::SyncMode::ptlock, sched::SyncMode::mutex)),
	[](const auto &info) {
		return std::get<0>(info.param) + "_" + sched::to_string(std::get<1>(info.param));
	});

TEST(Benchmarks, InvalidSpecs)
{
	BenchmarkSpec spec;
	spec.config = small_config();
	spec.name = "nope";
	EXPECT_THROW(run_benchmark(spec), std::invalid_argument);
	spec.name = "chain";
	spec.block_size = 0;
	EXPECT_THROW(run_benchmark(spec), std::invalid_argument);
}
