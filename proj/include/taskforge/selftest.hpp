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

#pragma once

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "taskforge/bench/benchmarks.hpp"
#include "taskforge/runtime/runtime.hpp"
#include "taskforge/sync/delegation_ticket_lock.hpp"
#include "taskforge/sync/partitioned_ticket_lock.hpp"
#include "taskforge/testing/random_program.hpp"
#include "taskforge/testing/stress.hpp"
#include "taskforge/trace/dump.hpp"

namespace taskforge {

struct SelfTestResult {
	std::string name;
	bool passed = false;
	std::string detail;
};

//! Scaled-down invariant checks that finish in seconds.
inline std::vector<SelfTestResult> run_selftest(std::size_t workers = 4)
{
	std::vector<SelfTestResult> results;
	auto check = [&](std::string name, const std::function<std::string()> &body) {
		try {
			std::string failure = body();
			results.push_back({std::move(name), failure.empty(), std::move(failure)});
		} catch (const std::exception &error) {
			results.push_back({std::move(name), false, error.what()});
		}
	};

	check("ptlock mutual exclusion", [] {
		sync::PartitionedTicketLock lock(4);
		const auto count = testing::lock_counter_stress(lock, 4, 20000);
		return count == 80000 ? std::string() : "counter " + std::to_string(count);
	});

	check("scheduler conservation", [] {
		const auto r = testing::scheduler_conservation(sched::SyncMode::dtlock, 2, 4, 20000);
		return r.ok() ? std::string()
					  : "consumed " + std::to_string(r.consumed) + " duplicates "
				+ std::to_string(r.duplicates) + " missing " + std::to_string(r.missing);
	});

	check("dependency serializability", [workers] {
		RuntimeConfig config;
		config.workers = workers;
		config.pin = false;
		config.auditing = true;
		for (std::uint64_t seed = 1; seed <= 25; ++seed) {
			const auto program = testing::generate_program(seed);
			testing::ProgramRun run_state(program);
			const RunReport report = run(config, run_state.root());
			const auto violations = run_state.violations();
			if (!violations.empty())
				return "seed " + std::to_string(seed) + ": " + violations.front();
			if (!report.audit.clean())
				return "seed " + std::to_string(seed) + ": audit violations";
			if (!report.clean())
				return "seed " + std::to_string(seed) + ": unclean teardown";
		}
		return std::string();
	});

	check("benchmarks match serial oracles", [workers] {
		for (auto name : bench::benchmark_names()) {
			bench::BenchmarkSpec spec;
			spec.name = std::string(name);
			spec.problem_size = name == "matmul" ? 64 : 4096;
			spec.block_size = name == "matmul" ? 16 : 64;
			spec.config.workers = workers;
			spec.config.pin = false;
			bench::run_benchmark(spec);
		}
		return std::string();
	});

	check("trace conservation", [workers] {
		const auto dir = std::filesystem::temp_directory_path()
			/ ("taskforge-selftest-" + std::to_string(::getpid()));
		std::filesystem::remove_all(dir);
		bench::BenchmarkSpec spec;
		spec.name = "spawn_storm";
		spec.problem_size = 1 << 14;
		spec.block_size = 16;
		spec.config.workers = workers;
		spec.config.pin = false;
		spec.config.trace_enabled = true;
		spec.config.trace_dir = dir;
		const auto result = bench::run_benchmark(spec);
		const auto &t = result.report.trace;
		const auto dumped = trace::read_trace_dir(dir);
		std::filesystem::remove_all(dir);
		if (t.emitted != t.persisted + t.dropped)
			return "emitted " + std::to_string(t.emitted) + " persisted "
				+ std::to_string(t.persisted) + " dropped " + std::to_string(t.dropped);
		if (dumped.records.size() != t.persisted || !dumped.issues.empty())
			return "dump recovered " + std::to_string(dumped.records.size()) + " records";
		for (std::size_t i = 1; i < dumped.records.size(); ++i)
			if (dumped.records[i].record.timestamp_ns < dumped.records[i - 1].record.timestamp_ns)
				return std::string("dump is not timestamp-sorted");
		return std::string();
	});

	{
		const double ns = testing::median_emit_ns();
		std::ostringstream detail;
		// Informational: depends on the machine.
		detail << "median " << ns << " ns, soft bound 100 ns "
			   << (ns < 100.0 ? "met" : "not met");
		results.push_back({"trace emit cost", true, detail.str()});
	}
	return results;
}

} // namespace taskforge
