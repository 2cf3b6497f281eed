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
#include <cstdint>
#include <memory>
#include <optional>
#include <type_traits>
#include <utility>

#include "taskforge/platform.hpp"

namespace taskforge::sync {

//! Bounded wait-free single-producer single-consumer queue.
//!
//! Indices grow without bound and are reduced modulo the capacity, so
//! 0 <= produced - consumed <= capacity always holds. push and pop are
//! straight-line code with no retries.
template <typename T>
class SpscQueue {
public:
	explicit SpscQueue(std::size_t capacity)
		: _capacity(capacity == 0 ? 1 : capacity),
		_slots(std::make_unique<T[]>(_capacity))
	{
	}

	SpscQueue(const SpscQueue &) = delete;
	SpscQueue &operator=(const SpscQueue &) = delete;

	//! Producer side. Returns false when the queue is full, leaving `item`
	//! untouched.
	template <typename U>
	bool push(U &&item) noexcept(std::is_nothrow_assignable_v<T &, U &&>)
	{
		const std::uint64_t produced = _produced.value.load(std::memory_order_relaxed);
		if (produced - _consumed.value.load(std::memory_order_acquire) == _capacity)
			return false;
		_slots[produced % _capacity] = std::forward<U>(item);
		_produced.value.store(produced + 1, std::memory_order_release);
		return true;
	}

	//! Consumer side.
	std::optional<T> pop() noexcept(std::is_nothrow_move_constructible_v<T>)
	{
		const std::uint64_t consumed = _consumed.value.load(std::memory_order_relaxed);
		if (_produced.value.load(std::memory_order_acquire) == consumed)
			return std::nullopt;
		std::optional<T> item(std::move(_slots[consumed % _capacity]));
		_consumed.value.store(consumed + 1, std::memory_order_release);
		return item;
	}

	std::size_t capacity() const noexcept { return _capacity; }

	//! Exact only when neither side is active.
	std::size_t size_approx() const noexcept
	{
		return static_cast<std::size_t>(_produced.value.load(std::memory_order_acquire)
			- _consumed.value.load(std::memory_order_acquire));
	}

private:
	std::size_t _capacity;
	std::unique_ptr<T[]> _slots;
	Padded<std::atomic<std::uint64_t>> _produced;
	Padded<std::atomic<std::uint64_t>> _consumed;
};

} // namespace taskforge::sync
