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

#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>

#include "taskforge/deps/data_access.hpp"

namespace taskforge {

enum class TaskState : std::uint8_t {
	created,
	ready,
	running,
	completed,
	disposed,
};

inline const char *to_string(TaskState state) noexcept
{
	switch (state) {
		case TaskState::created:
			return "created";
		case TaskState::ready:
			return "ready";
		case TaskState::running:
			return "running";
		case TaskState::completed:
			return "completed";
		case TaskState::disposed:
			return "disposed";
	}
	return "?";
}

//! Access storage with a small inline buffer; larger sets spill to the heap.
class AccessArray {
public:
	static constexpr std::size_t inline_capacity = 4;

	AccessArray() = default;
	AccessArray(const AccessArray &) = delete;
	AccessArray &operator=(const AccessArray &) = delete;

	//! Only valid once, before any access is published.
	void resize(std::size_t count)
	{
		if (count > inline_capacity)
			_heap = std::make_unique<deps::DataAccess[]>(count);
		_size = count;
	}

	std::span<deps::DataAccess> span() noexcept
	{
		return {_heap ? _heap.get() : _inline.data(), _size};
	}
	std::span<const deps::DataAccess> span() const noexcept
	{
		return {_heap ? _heap.get() : _inline.data(), _size};
	}

	std::size_t size() const noexcept { return _size; }
	deps::DataAccess &operator[](std::size_t i) noexcept { return span()[i]; }

private:
	std::array<deps::DataAccess, inline_capacity> _inline;
	std::unique_ptr<deps::DataAccess[]> _heap;
	std::size_t _size = 0;
};

//! The schedulable unit: a closure plus its declared accesses.
//!
//! refs counts what keeps the record alive: the task itself until it
//! completes, each access until it reaches its terminal state, and each child
//! until the child is disposed.
struct Task {
	std::function<void()> body;
	AccessArray accesses;
	std::atomic<std::int32_t> readiness{0};
	std::atomic<std::int32_t> child_count{0};
	std::atomic<std::int32_t> refs{1};
	Task *parent = nullptr;
	std::unique_ptr<deps::DependencyDomain> domain;
	std::atomic<TaskState> state{TaskState::created};
	std::uint64_t id = 0;
	bool unregistered = false;

	deps::DependencyDomain &child_domain()
	{
		if (!domain) {
			domain = std::make_unique<deps::DependencyDomain>(this);
			for (deps::DataAccess &access : accesses.span())
				domain->owner_accesses.emplace(access.address, &access);
		}
		return *domain;
	}
};

} // namespace taskforge
