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

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "taskforge/bench/benchmarks.hpp"
#include "taskforge/sched/scheduler.hpp"

namespace taskforge::bench {

//! Named runtime variants compared in a sweep.
struct Variant {
	std::string_view name;
	sched::SyncMode sync;
};

inline const std::vector<Variant> &variants()
{
	static const std::vector<Variant> all = {
		{"optimized", sched::SyncMode::dtlock},
		{"no-dtlock", sched::SyncMode::ptlock},
		{"mutex", sched::SyncMode::mutex},
	};
	return all;
}

inline const Variant &find_variant(std::string_view name)
{
	for (const Variant &v : variants())
		if (v.name == name)
			return v;
	throw std::invalid_argument("unknown variant: " + std::string(name));
}

struct SweepRow {
	std::string benchmark;
	std::string variant;
	std::size_t problem_size = 0;
	std::size_t block_size = 0;
	std::uint64_t work_units_per_task = 0;
	double perf_metric = 0; //!< mean over repetitions
	double efficiency = 0;
	double stddev = 0;      //!< sample standard deviation over repetitions
	std::size_t samples = 0;
	RunReport last_report;
};

inline double mean(const std::vector<double> &samples)
{
	double sum = 0;
	for (double s : samples)
		sum += s;
	return samples.empty() ? 0.0 : sum / static_cast<double>(samples.size());
}

inline double sample_stddev(const std::vector<double> &samples)
{
	if (samples.size() < 2)
		return 0.0;
	const double m = mean(samples);
	double acc = 0;
	for (double s : samples)
		acc += (s - m) * (s - m);
	return std::sqrt(acc / static_cast<double>(samples.size() - 1));
}

//! efficiency = perf / peak perf among rows of the same benchmark and problem
//! size, taken over every variant and block size of the sweep.
inline void apply_efficiency(std::vector<SweepRow> &rows)
{
	std::map<std::pair<std::string, std::size_t>, double> peak;
	for (const SweepRow &row : rows) {
		double &p = peak[{row.benchmark, row.problem_size}];
		p = std::max(p, row.perf_metric);
	}
	for (SweepRow &row : rows) {
		const double p = peak[{row.benchmark, row.problem_size}];
		row.efficiency = p > 0 ? row.perf_metric / p : 0.0;
	}
}

struct SweepOptions {
	std::vector<std::string> benchmarks;
	std::vector<std::size_t> problem_sizes; //!< empty: per-benchmark default
	std::vector<std::size_t> block_sizes;
	std::vector<std::string> variants = {"optimized", "no-dtlock", "mutex"};
	std::size_t repetitions = 5;
	//! Untimed runs per point before the measured repetitions.
	std::size_t warmup = 1;
	RuntimeConfig config;
};

//! Runs every benchmark x size x block size x variant combination
//! `repetitions` times. Variants take turns within each repetition, in
//! alternating order, so drift of the machine hits all of them alike. Rows come out grouped by
//! benchmark, size, variant, then block size. `progress` (optional) is told
//! about each row.
inline std::vector<SweepRow> sweep(const SweepOptions &options,
	const std::function<void(const SweepRow &)> &progress = {})
{
	if (options.block_sizes.empty())
		throw std::invalid_argument("sweep needs at least one block size");
	if (options.repetitions == 0)
		throw std::invalid_argument("repetitions must be at least 1");
	std::vector<const Variant *> variants;
	for (const std::string &name : options.variants)
		variants.push_back(&find_variant(name));

	std::vector<SweepRow> rows;
	for (const std::string &name : options.benchmarks) {
		std::vector<std::size_t> sizes = options.problem_sizes;
		if (sizes.empty())
			sizes.push_back(default_problem_size(name));
		for (std::size_t size : sizes) {
			// One row per variant x block, in output order.
			std::vector<SweepRow> group(variants.size() * options.block_sizes.size());
			std::vector<std::vector<double>> samples(group.size());
			for (std::size_t b = 0; b < options.block_sizes.size(); ++b) {
				auto spec_for = [&](const Variant &variant) {
					BenchmarkSpec spec;
					spec.name = name;
					spec.problem_size = size;
					spec.block_size = options.block_sizes[b];
					spec.repetitions = options.repetitions;
					spec.config = options.config;
					spec.config.sync = variant.sync;
					return spec;
				};
				for (std::size_t w = 0; w < options.warmup; ++w)
					for (const Variant *variant : variants)
						run_benchmark(spec_for(*variant));
				for (std::size_t r = 0; r < options.repetitions; ++r) {
					for (std::size_t k = 0; k < variants.size(); ++k) {
						// Odd repetitions walk the variants backwards.
						const std::size_t v = r % 2 == 0 ? k : variants.size() - 1 - k;
						const std::size_t slot = v * options.block_sizes.size() + b;
						BenchResult result = run_benchmark(spec_for(*variants[v]));
						samples[slot].push_back(result.perf_metric);
						group[slot].work_units_per_task = result.work_units_per_task;
						group[slot].last_report = result.report;
					}
				}
			}
			for (std::size_t v = 0; v < variants.size(); ++v) {
				for (std::size_t b = 0; b < options.block_sizes.size(); ++b) {
					const std::size_t slot = v * options.block_sizes.size() + b;
					SweepRow &row = group[slot];
					row.benchmark = name;
					row.variant = std::string(variants[v]->name);
					row.problem_size = size;
					row.block_size = options.block_sizes[b];
					row.perf_metric = mean(samples[slot]);
					row.stddev = sample_stddev(samples[slot]);
					row.samples = samples[slot].size();
					if (progress)
						progress(row);
					rows.push_back(std::move(row));
				}
			}
		}
	}
	apply_efficiency(rows);
	return rows;
}

inline void write_csv(std::ostream &out, const std::vector<SweepRow> &rows)
{
	out << "benchmark,variant,blockSize,workUnitsPerTask,perfMetric,efficiency,stddev,problemSize\n";
	for (const SweepRow &row : rows) {
		out << row.benchmark << ',' << row.variant << ',' << row.block_size << ','
			<< row.work_units_per_task << ',' << row.perf_metric << ',' << row.efficiency << ','
			<< row.stddev << ',' << row.problem_size << '\n';
	}
}

} // namespace taskforge::bench
