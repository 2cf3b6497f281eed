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

// Benchmark driver: granularity sweeps, trace dumps and a quick self-test.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "taskforge/bench/sweep.hpp"
#include "taskforge/selftest.hpp"
#include "taskforge/trace/dump.hpp"

namespace {

constexpr int exit_usage = 2;
constexpr int exit_failure = 1;

struct BenchArgs {
	std::vector<std::string> benchmarks = {"spawn_storm"};
	std::vector<std::size_t> sizes;
	std::vector<std::size_t> blocks = {16, 64, 256, 1024};
	std::size_t workers = 0;
	std::vector<std::string> variants = {"optimized", "no-dtlock", "mutex"};
	std::size_t reps = 5;
	std::string out;
	std::string trace_dir;
	std::string config_file;
	bool no_pin = false;
};

int run_bench(const BenchArgs &args)
{
	taskforge::bench::SweepOptions options;
	try {
		if (!args.config_file.empty())
			options.config.load_file(args.config_file);
		options.config.apply_environment();
	} catch (const std::exception &error) {
		std::cerr << "taskforge-bench: " << error.what() << '\n';
		return exit_usage;
	}
	if (args.workers != 0)
		options.config.workers = args.workers;
	if (args.no_pin)
		options.config.pin = false;
	if (!args.trace_dir.empty()) {
		options.config.trace_enabled = true;
		options.config.trace_dir = args.trace_dir;
	}
	for (const std::string &name : args.benchmarks) {
		if (name == "all") {
			for (auto known : taskforge::bench::benchmark_names())
				options.benchmarks.emplace_back(known);
		} else if (taskforge::bench::is_benchmark(name)) {
			options.benchmarks.push_back(name);
		} else {
			std::cerr << "taskforge-bench: unknown benchmark " << name << '\n';
			return exit_usage;
		}
	}
	for (const std::string &variant : args.variants) {
		try {
			taskforge::bench::find_variant(variant);
		} catch (const std::exception &error) {
			std::cerr << "taskforge-bench: " << error.what() << '\n';
			return exit_usage;
		}
	}
	options.problem_sizes = args.sizes;
	options.block_sizes = args.blocks;
	options.variants = args.variants;
	options.repetitions = args.reps;

	std::vector<taskforge::bench::SweepRow> rows;
	taskforge::TraceStats trace_total;
	try {
		rows = taskforge::bench::sweep(options, [&](const taskforge::bench::SweepRow &row) {
			std::cerr << row.benchmark << ' ' << row.variant << " block " << row.block_size
					  << ": " << row.perf_metric << " units/s\n";
			trace_total.emitted += row.last_report.trace.emitted;
			trace_total.persisted += row.last_report.trace.persisted;
			trace_total.dropped += row.last_report.trace.dropped;
		});
	} catch (const taskforge::bench::BenchmarkError &error) {
		std::cerr << "taskforge-bench: benchmark failed: " << error.what() << '\n';
		return exit_failure;
	} catch (const std::exception &error) {
		std::cerr << "taskforge-bench: " << error.what() << '\n';
		return exit_failure;
	}

	if (args.out.empty()) {
		taskforge::bench::write_csv(std::cout, rows);
	} else {
		std::ofstream file(args.out);
		if (!file) {
			std::cerr << "taskforge-bench: cannot write " << args.out << '\n';
			return exit_failure;
		}
		taskforge::bench::write_csv(file, rows);
	}
	if (options.config.trace_enabled) {
		// Trace files hold the last repetition of the last row.
		std::cerr << "trace: emitted " << trace_total.emitted << ", persisted "
				  << trace_total.persisted << ", dropped " << trace_total.dropped << '\n';
	}
	return 0;
}

int run_dump(const std::string &dir, const std::string &out)
{
	const auto result = taskforge::trace::read_trace_dir(dir);
	for (const auto &issue : result.issues) {
		std::cerr << "taskforge-bench: " << issue.file.string() << " at byte " << issue.offset
				  << ": " << issue.message << '\n';
	}
	if (out.empty()) {
		taskforge::trace::write_csv(std::cout, result);
	} else {
		std::ofstream file(out);
		if (!file) {
			std::cerr << "taskforge-bench: cannot write " << out << '\n';
			return exit_failure;
		}
		taskforge::trace::write_csv(file, result);
	}
	return result.issues.empty() ? 0 : exit_failure;
}

int run_selftest(std::size_t workers)
{
	bool all = true;
	for (const auto &result : taskforge::run_selftest(workers == 0 ? 4 : workers)) {
		std::cout << (result.passed ? "PASS " : "FAIL ") << result.name;
		if (!result.detail.empty())
			std::cout << ": " << result.detail;
		std::cout << '\n';
		all = all && result.passed;
	}
	return all ? 0 : exit_failure;
}

} // namespace

int main(int argc, char **argv)
{
	CLI::App app{"TaskForge benchmark driver"};
	app.require_subcommand(1);

	BenchArgs bench;
	auto *bench_cmd = app.add_subcommand("bench", "Run a granularity sweep and print CSV");
	bench_cmd->add_option("--benchmark", bench.benchmarks,
				 "spawn_storm, chain, stencil, matmul, dotsum or all")
		->delimiter(',');
	bench_cmd->add_option("--sizes", bench.sizes, "Problem sizes (matmul: matrix dimension)")
		->delimiter(',');
	bench_cmd->add_option("--blocks", bench.blocks, "Block sizes in work units per task")
		->delimiter(',');
	bench_cmd->add_option("--workers", bench.workers, "Worker threads (default: all CPUs)");
	bench_cmd->add_option("--variant", bench.variants, "optimized, no-dtlock, mutex")
		->delimiter(',');
	bench_cmd->add_option("--reps", bench.reps, "Repetitions per point")
		->check(CLI::PositiveNumber);
	bench_cmd->add_option("--out", bench.out, "CSV output file (default: stdout)");
	bench_cmd->add_option("--trace", bench.trace_dir, "Enable tracing into this directory");
	bench_cmd->add_option("--config", bench.config_file, "Runtime config file (key = value)");
	bench_cmd->add_flag("--no-pin", bench.no_pin, "Do not pin workers to CPUs");

	std::string dump_dir;
	std::string dump_out;
	auto *dump_cmd = app.add_subcommand("dump", "Convert trace files to CSV");
	dump_cmd->add_option("dir", dump_dir, "Directory holding trace_<worker>.tfb files")->required();
	dump_cmd->add_option("--out", dump_out, "CSV output file (default: stdout)");

	std::size_t selftest_workers = 0;
	auto *selftest_cmd = app.add_subcommand("selftest", "Quick invariant checks");
	selftest_cmd->add_option("--workers", selftest_workers, "Worker threads (default: 4)");

	if (argc <= 1) {
		std::cerr << app.help();
		return exit_usage;
	}
	try {
		app.parse(argc, argv);
	} catch (const CLI::CallForHelp &) {
		std::cout << app.help();
		return 0;
	} catch (const CLI::ParseError &error) {
		std::cerr << "taskforge-bench: " << error.what() << "\n\n" << app.help();
		return exit_usage;
	}

	if (*bench_cmd) {
		if (bench.blocks.empty()) {
			std::cerr << "taskforge-bench: --blocks needs at least one value\n";
			return exit_usage;
		}
		return run_bench(bench);
	}
	if (*dump_cmd)
		return run_dump(dump_dir, dump_out);
	if (*selftest_cmd)
		return run_selftest(selftest_workers);
	std::cerr << app.help();
	return exit_usage;
}
