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

#include <atomic>
#include <bit>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <thread>

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#endif

#ifndef TASKFORGE_CACHE_LINE
#define TASKFORGE_CACHE_LINE 64
#endif

// Debug checks (ownership, generation tags, message legality) follow NDEBUG
// unless forced either way.
#ifndef TASKFORGE_DEBUG_CHECKS
#ifdef NDEBUG
#define TASKFORGE_DEBUG_CHECKS 0
#else
#define TASKFORGE_DEBUG_CHECKS 1
#endif
#endif

#define TASKFORGE_CHECK(cond, msg)                                                         \
	do {                                                                                   \
		if (!(cond)) {                                                                     \
			std::fprintf(stderr, "taskforge: check failed: %s (%s) at %s:%d\n", msg, #cond, \
				__FILE__, __LINE__);                                                       \
			std::abort();                                                                  \
		}                                                                                  \
	} while (false)

#if TASKFORGE_DEBUG_CHECKS
#define TASKFORGE_DEBUG_ASSERT(cond, msg) TASKFORGE_CHECK(cond, msg)
#else
#define TASKFORGE_DEBUG_ASSERT(cond, msg) ((void) 0)
#endif

namespace taskforge {

inline constexpr std::size_t cache_line_size = TASKFORGE_CACHE_LINE;

//! Wraps a value so that it owns a full cache line.
template <typename T>
struct alignas(cache_line_size) Padded {
	T value{};
};

inline void cpu_relax() noexcept
{
#if defined(__x86_64__) || defined(__i386__)
	_mm_pause();
#elif defined(__aarch64__)
	asm volatile("yield" ::: "memory");
#else
	std::atomic_signal_fence(std::memory_order_seq_cst);
#endif
}

inline std::size_t hardware_threads() noexcept
{
	static const std::size_t count = [] {
		unsigned n = std::thread::hardware_concurrency();
		return n == 0 ? std::size_t{1} : std::size_t{n};
	}();
	return count;
}

constexpr std::uint64_t next_pow2(std::uint64_t value) noexcept
{
	return value <= 1 ? 1 : std::bit_ceil(value);
}

//! Busy-wait helper. Spins with a relax hint, then falls back to yielding the
//! time slice. On a single hardware thread it yields immediately since the
//! thread we wait for cannot run concurrently.
class SpinWait {
public:
	void wait() noexcept
	{
		if (_spins < spin_limit()) {
			++_spins;
			cpu_relax();
		} else {
			std::this_thread::yield();
		}
	}

	void reset() noexcept { _spins = 0; }

private:
	static unsigned spin_limit() noexcept
	{
		static const unsigned limit = hardware_threads() > 1 ? 128u : 0u;
		return limit;
	}

	unsigned _spins = 0;
};

//! Exponential backoff for idle polling, capped at a configurable delay.
//! Never sleeps in the OS: it burns the delay with relax hints and yields.
class IdleBackoff {
public:
	explicit IdleBackoff(std::chrono::nanoseconds cap = std::chrono::microseconds(50)) noexcept
		: _cap(cap)
	{
	}

	void pause() noexcept
	{
		using clock = std::chrono::steady_clock;
		auto delay = std::chrono::nanoseconds(256) * (std::uint64_t{1} << _step);
		if (delay >= _cap) {
			delay = _cap;
		} else {
			++_step;
		}
		const auto deadline = clock::now() + delay;
		SpinWait spin;
		while (clock::now() < deadline) {
			spin.wait();
		}
	}

	void reset() noexcept { _step = 0; }

private:
	std::chrono::nanoseconds _cap;
	unsigned _step = 0;
};

} // namespace taskforge
