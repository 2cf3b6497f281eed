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
#include <cstdint>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "taskforge/platform.hpp"
#include "taskforge/sched/scheduler.hpp"
#include "taskforge/trace/trace_buffer.hpp"

// Multi-threaded stress drivers shared by the tests, the acceptance suite and
// the CLI self-test.

namespace taskforge::testing {

//! Starts `threads` threads that each run `iterations` critical sections
//! incrementing a plain counter. Returns the final counter.
template <typename Lock>
std::uint64_t lock_counter_stress(Lock &lock, std::size_t threads, std::size_t iterations)
{
	std::uint64_t counter = 0;
	std::atomic<bool> go{false};
	std::vector<std::thread> pool;
	for (std::size_t t = 0; t < threads; ++t) {
		pool.emplace_back([&] {
			while (!go.load(std::memory_order_acquire))
				std::this_thread::yield();
			for (std::size_t i = 0; i < iterations; ++i) {
				lock.lock();
				++counter;
				lock.unlock();
			}
		});
	}
	go.store(true, std::memory_order_release);
	for (auto &thread : pool)
		thread.join();
	return counter;
}

struct ConservationResult {
	std::uint64_t produced = 0;
	std::uint64_t consumed = 0;
	std::uint64_t duplicates = 0;
	std::uint64_t missing = 0;
	sched::SchedulerStats stats;

	bool ok() const noexcept { return produced == consumed && duplicates == 0 && missing == 0; }
};

//! Producers push distinct integers, consumers pull until all are taken.
inline ConservationResult scheduler_conservation(sched::SyncMode mode, std::size_t producers,
	std::size_t consumers, std::size_t per_producer, std::size_t queues = 2,
	std::size_t capacity = 512)
{
	sched::SchedulerOptions options;
	options.max_threads = producers + consumers;
	options.queues = queues;
	options.capacity = capacity;
	auto scheduler = sched::make_scheduler<std::uint64_t>(mode, options);

	const std::uint64_t total = producers * per_producer;
	auto seen = std::make_unique<std::atomic<std::uint8_t>[]>(total);
	std::atomic<std::uint64_t> consumed{0};
	std::atomic<std::uint64_t> duplicates{0};
	std::atomic<bool> go{false};

	std::vector<std::thread> threads;
	for (std::size_t p = 0; p < producers; ++p) {
		threads.emplace_back([&, p] {
			while (!go.load(std::memory_order_acquire))
				std::this_thread::yield();
			for (std::size_t i = 0; i < per_producer; ++i)
				scheduler->add_ready_task(p * per_producer + i, p);
		});
	}
	for (std::size_t c = 0; c < consumers; ++c) {
		threads.emplace_back([&, c] {
			while (!go.load(std::memory_order_acquire))
				std::this_thread::yield();
			SpinWait spin;
			while (consumed.load(std::memory_order_relaxed) < total) {
				if (auto item = scheduler->get_ready_task(c)) {
					if (seen[*item].fetch_add(1, std::memory_order_relaxed) != 0)
						duplicates.fetch_add(1, std::memory_order_relaxed);
					consumed.fetch_add(1, std::memory_order_relaxed);
					spin.reset();
				} else {
					spin.wait();
				}
			}
		});
	}
	go.store(true, std::memory_order_release);
	for (auto &thread : threads)
		thread.join();

	ConservationResult result;
	result.produced = total;
	result.consumed = consumed.load();
	result.duplicates = duplicates.load();
	for (std::uint64_t i = 0; i < total; ++i)
		result.missing += seen[i].load() == 0 ? 1 : 0;
	result.stats = scheduler->stats();
	return result;
}

//! Median cost of one trace emit, measured over batches of `batch` emits.
inline double median_emit_ns(std::size_t batches = 101, std::size_t batch = 1000)
{
	trace::TraceBuffer buffer(4);
	trace::TraceFile sink;
	sink.open("/dev/null");
	std::vector<double> costs;
	costs.reserve(batches);
	for (std::size_t b = 0; b < batches; ++b) {
		// Keep room so the measured path is the append, not the drop.
		buffer.flush(sink, true);
		const std::uint64_t start = trace::now_ns();
		for (std::size_t i = 0; i < batch; ++i)
			buffer.emit(trace::EventId::task_start, i);
		costs.push_back(static_cast<double>(trace::now_ns() - start) / static_cast<double>(batch));
	}
	std::nth_element(costs.begin(), costs.begin() + costs.size() / 2, costs.end());
	return costs[costs.size() / 2];
}

} // namespace taskforge::testing
