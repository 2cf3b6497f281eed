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
#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "taskforge/runtime/config.hpp"
#include "taskforge/runtime/runtime.hpp"

namespace taskforge::bench {

//! Raised when a workload disagrees with its serial oracle or the runtime
//! does not tear down cleanly.
class BenchmarkError : public std::runtime_error {
public:
	using std::runtime_error::runtime_error;
};

inline const std::vector<std::string_view> &benchmark_names()
{
	static const std::vector<std::string_view> names
		= {"spawn_storm", "chain", "stencil", "matmul", "dotsum"};
	return names;
}

inline bool is_benchmark(std::string_view name)
{
	const auto &names = benchmark_names();
	return std::find(names.begin(), names.end(), name) != names.end();
}

//! Default problem size per benchmark. For matmul it is the matrix dimension,
//! for the others the number of work units.
inline std::size_t default_problem_size(std::string_view name)
{
	if (name == "matmul")
		return 256;
	if (name == "stencil")
		return 1 << 18;
	return 1 << 20;
}

struct BenchmarkSpec {
	std::string name = "spawn_storm";
	std::size_t problem_size = 1 << 16;
	std::size_t block_size = 64;
	std::size_t repetitions = 1;
	RuntimeConfig config;
};

struct BenchResult {
	std::uint64_t tasks_executed = 0;
	std::uint64_t wall_time_ns = 0;
	double throughput = 0;  //!< tasks per second
	double perf_metric = 0; //!< work units per second
	std::uint64_t work_units_per_task = 0;
	RunReport report;
};

namespace detail {

//! One work unit: a single step of a 64-bit linear congruential generator.
inline std::uint64_t work(std::uint64_t state, std::size_t units) noexcept
{
	for (std::size_t i = 0; i < units; ++i)
		state = state * 6364136223846793005ull + 1442695040888963407ull;
	return state;
}

inline std::size_t blocks_of(std::size_t n, std::size_t bs) { return (n + bs - 1) / bs; }

inline std::uint64_t address_of(const void *p) { return reinterpret_cast<std::uintptr_t>(p); }

struct Workload {
	std::uint64_t tasks = 0;
	std::uint64_t units = 0;
	std::uint64_t units_per_task = 0;
	std::uint64_t elapsed_ns = 0;
	RunReport report;
};

class Stopwatch {
public:
	Stopwatch() : _start(std::chrono::steady_clock::now()) {}
	std::uint64_t elapsed_ns() const
	{
		return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::nanoseconds>(
			std::chrono::steady_clock::now() - _start)
				.count());
	}

private:
	std::chrono::steady_clock::time_point _start;
};

inline void expect(bool condition, const std::string &what)
{
	if (!condition)
		throw BenchmarkError(what);
}

inline Workload spawn_storm(const BenchmarkSpec &spec)
{
	const std::size_t n = spec.problem_size;
	const std::size_t bs = spec.block_size;
	const std::size_t blocks = blocks_of(n, bs);
	std::vector<std::uint64_t> out(blocks, 0);
	Workload w{blocks, n, bs, 0, {}};
	w.report = run(spec.config, [&] {
		Stopwatch clock;
		for (std::size_t b = 0; b < blocks; ++b) {
			spawn([&out, b, bs, n] { out[b] = work(b, std::min(bs, n - b * bs)); });
		}
		taskwait();
		w.elapsed_ns = clock.elapsed_ns();
	});
	for (std::size_t b = 0; b < blocks; ++b)
		expect(out[b] == work(b, std::min(bs, n - b * bs)),
			"spawn_storm: block " + std::to_string(b) + " differs from serial result");
	expect(w.report.clean(), "spawn_storm: runtime did not tear down cleanly");
	return w;
}

inline Workload chain(const BenchmarkSpec &spec, std::vector<std::size_t> *order_out = nullptr)
{
	const std::size_t n = spec.problem_size;
	const std::size_t bs = spec.block_size;
	const std::size_t blocks = blocks_of(n, bs);
	std::uint64_t state = 1;
	std::vector<std::size_t> order;
	order.reserve(blocks);
	Workload w{blocks, n, bs, 0, {}};
	w.report = run(spec.config, [&] {
		Stopwatch clock;
		const deps::AccessDecl decl{address_of(&state), deps::AccessType::write};
		for (std::size_t b = 0; b < blocks; ++b) {
			spawn([&, b] {
				order.push_back(b);
				state = work(state, std::min(bs, n - b * bs));
			}, {decl});
		}
		taskwait();
		w.elapsed_ns = clock.elapsed_ns();
	});
	std::uint64_t serial = 1;
	for (std::size_t b = 0; b < blocks; ++b)
		serial = work(serial, std::min(bs, n - b * bs));
	expect(order.size() == blocks, "chain: wrong number of executions");
	for (std::size_t b = 0; b < blocks; ++b)
		expect(order[b] == b, "chain: block " + std::to_string(b) + " ran out of order");
	expect(state == serial, "chain: final state differs from serial result");
	expect(w.report.clean(), "chain: runtime did not tear down cleanly");
	if (order_out != nullptr)
		*order_out = std::move(order);
	return w;
}

inline constexpr std::size_t stencil_iterations = 4;

inline void stencil_block(std::vector<std::uint64_t> &x, std::size_t begin, std::size_t end)
{
	for (std::size_t i = begin; i < end; ++i) {
		const std::uint64_t left = i == 0 ? 0 : x[i - 1];
		const std::uint64_t right = i + 1 == x.size() ? 0 : x[i + 1];
		x[i] = left * 3 + x[i] * 5 + right * 7 + 1;
	}
}

inline Workload stencil(const BenchmarkSpec &spec)
{
	const std::size_t n = spec.problem_size;
	const std::size_t bs = spec.block_size;
	const std::size_t blocks = blocks_of(n, bs);
	std::vector<std::uint64_t> x(n);
	for (std::size_t i = 0; i < n; ++i)
		x[i] = i;
	std::vector<std::uint64_t> serial = x;
	Workload w{blocks * stencil_iterations, n * stencil_iterations, bs, 0, {}};
	w.report = run(spec.config, [&] {
		Stopwatch clock;
		for (std::size_t it = 0; it < stencil_iterations; ++it) {
			for (std::size_t b = 0; b < blocks; ++b) {
				std::vector<deps::AccessDecl> decls;
				if (b > 0)
					decls.push_back({address_of(&x[(b - 1) * bs]), deps::AccessType::read});
				if (b + 1 < blocks)
					decls.push_back({address_of(&x[(b + 1) * bs]), deps::AccessType::read});
				decls.push_back({address_of(&x[b * bs]), deps::AccessType::write});
				spawn([&x, b, bs, n] { stencil_block(x, b * bs, std::min(n, (b + 1) * bs)); },
					decls);
			}
		}
		taskwait();
		w.elapsed_ns = clock.elapsed_ns();
	});
	for (std::size_t it = 0; it < stencil_iterations; ++it)
		stencil_block(serial, 0, n);
	for (std::size_t i = 0; i < n; ++i)
		expect(x[i] == serial[i], "stencil: cell " + std::to_string(i) + " differs from serial result");
	expect(w.report.clean(), "stencil: runtime did not tear down cleanly");
	return w;
}

//! Square matrices of integer-valued doubles, so sums are exact.
struct Matrices {
	explicit Matrices(std::size_t dim) : n(dim), a(dim * dim), b(dim * dim), c(dim * dim, 0.0)
	{
		for (std::size_t i = 0; i < dim; ++i) {
			for (std::size_t j = 0; j < dim; ++j) {
				a[i * dim + j] = static_cast<double>((i * 7 + j * 3) % 8);
				b[i * dim + j] = static_cast<double>((i * 5 + j * 11) % 8);
			}
		}
	}

	std::size_t n;
	std::vector<double> a, b, c;
};

inline void matmul_tile(Matrices &m, std::size_t i0, std::size_t j0, std::size_t k0, std::size_t bs)
{
	const std::size_t n = m.n;
	const std::size_t i1 = std::min(n, i0 + bs), j1 = std::min(n, j0 + bs), k1 = std::min(n, k0 + bs);
	for (std::size_t i = i0; i < i1; ++i)
		for (std::size_t k = k0; k < k1; ++k)
			for (std::size_t j = j0; j < j1; ++j)
				m.c[i * n + j] += m.a[i * n + k] * m.b[k * n + j];
}

inline Workload matmul(const BenchmarkSpec &spec)
{
	const std::size_t n = spec.problem_size;
	const std::size_t bs = std::min(spec.block_size, n);
	const std::size_t tiles = blocks_of(n, bs);
	Matrices m(n);
	Workload w{tiles * tiles * tiles, n * n * n, bs * bs * bs, 0, {}};
	w.report = run(spec.config, [&] {
		Stopwatch clock;
		for (std::size_t ti = 0; ti < tiles; ++ti) {
			for (std::size_t tj = 0; tj < tiles; ++tj) {
				for (std::size_t tk = 0; tk < tiles; ++tk) {
					const std::size_t i0 = ti * bs, j0 = tj * bs, k0 = tk * bs;
					spawn([&m, i0, j0, k0, bs] { matmul_tile(m, i0, j0, k0, bs); },
						{{address_of(&m.a[i0 * n + k0]), deps::AccessType::read},
							{address_of(&m.b[k0 * n + j0]), deps::AccessType::read},
							{address_of(&m.c[i0 * n + j0]), deps::AccessType::readwrite}});
				}
			}
		}
		taskwait();
		w.elapsed_ns = clock.elapsed_ns();
	});
	// Serial reference: plain triple loop, k ascending per element.
	for (std::size_t i = 0; i < n; ++i) {
		for (std::size_t j = 0; j < n; ++j) {
			double sum = 0;
			for (std::size_t k = 0; k < n; ++k)
				sum += m.a[i * n + k] * m.b[k * n + j];
			expect(m.c[i * n + j] == sum,
				"matmul: C(" + std::to_string(i) + "," + std::to_string(j) + ") differs from serial result");
		}
	}
	expect(w.report.clean(), "matmul: runtime did not tear down cleanly");
	return w;
}

inline Workload dotsum(const BenchmarkSpec &spec)
{
	const std::size_t n = spec.problem_size;
	const std::size_t bs = spec.block_size;
	const std::size_t blocks = blocks_of(n, bs);
	std::vector<std::uint64_t> x(n), y(n);
	for (std::size_t i = 0; i < n; ++i) {
		x[i] = i % 13;
		y[i] = (i * 7) % 11;
	}
	// One cache line per partial so blocks do not share lines.
	std::vector<Padded<std::uint64_t>> partial(blocks);
	std::uint64_t total = 0;
	Workload w{blocks + 1, n, bs, 0, {}};
	w.report = run(spec.config, [&] {
		Stopwatch clock;
		for (std::size_t b = 0; b < blocks; ++b) {
			spawn([&, b] {
				std::uint64_t sum = 0;
				for (std::size_t i = b * bs; i < std::min(n, (b + 1) * bs); ++i)
					sum += x[i] * y[i];
				partial[b].value = sum;
			}, {{address_of(&partial[b]), deps::AccessType::write}});
		}
		std::vector<deps::AccessDecl> reads;
		reads.reserve(blocks);
		for (std::size_t b = 0; b < blocks; ++b)
			reads.push_back({address_of(&partial[b]), deps::AccessType::read});
		spawn([&] {
			std::uint64_t sum = 0;
			for (const auto &p : partial)
				sum += p.value;
			total = sum;
		}, reads);
		taskwait();
		w.elapsed_ns = clock.elapsed_ns();
	});
	std::uint64_t serial = 0;
	for (std::size_t i = 0; i < n; ++i)
		serial += x[i] * y[i];
	expect(total == serial, "dotsum: total " + std::to_string(total) + " differs from serial "
		+ std::to_string(serial));
	expect(w.report.clean(), "dotsum: runtime did not tear down cleanly");
	return w;
}

} // namespace detail

//! Runs one repetition of the named workload, validates it against the serial
//! oracle and reports timing measured inside the root task.
inline BenchResult run_benchmark(const BenchmarkSpec &spec)
{
	if (spec.block_size == 0)
		throw std::invalid_argument("block size must be positive");
	if (spec.problem_size == 0)
		throw std::invalid_argument("problem size must be positive");
	detail::Workload w;
	if (spec.name == "spawn_storm")
		w = detail::spawn_storm(spec);
	else if (spec.name == "chain")
		w = detail::chain(spec);
	else if (spec.name == "stencil")
		w = detail::stencil(spec);
	else if (spec.name == "matmul")
		w = detail::matmul(spec);
	else if (spec.name == "dotsum")
		w = detail::dotsum(spec);
	else
		throw std::invalid_argument("unknown benchmark: " + spec.name);

	BenchResult result;
	result.tasks_executed = w.tasks;
	result.wall_time_ns = std::max<std::uint64_t>(w.elapsed_ns, 1);
	const double seconds = static_cast<double>(result.wall_time_ns) * 1e-9;
	result.throughput = static_cast<double>(w.tasks) / seconds;
	result.perf_metric = static_cast<double>(w.units) / seconds;
	result.work_units_per_task = w.units_per_task;
	result.report = w.report;
	return result;
}

//! Runs the chain workload and returns the order in which its blocks ran.
inline std::vector<std::size_t> chain_execution_order(const BenchmarkSpec &spec)
{
	std::vector<std::size_t> order;
	detail::chain(spec, &order);
	return order;
}

} // namespace taskforge::bench
