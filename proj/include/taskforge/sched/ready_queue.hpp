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

#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace taskforge::sched {

enum class PolicyKind {
	fifo,
	lifo,
};

inline PolicyKind parse_policy(std::string_view name)
{
	if (name == "fifo")
		return PolicyKind::fifo;
	if (name == "lifo")
		return PolicyKind::lifo;
	throw std::invalid_argument("unknown scheduling policy: " + std::string(name));
}

//! Unsynchronized ready container; the wrapping scheduler serializes access.
template <typename T>
class ReadyQueue {
public:
	explicit ReadyQueue(PolicyKind kind = PolicyKind::fifo) : _kind(kind) {}

	void push(T item) { _items.push_back(std::move(item)); }

	std::optional<T> pop()
	{
		if (_items.empty())
			return std::nullopt;
		std::optional<T> item;
		if (_kind == PolicyKind::fifo) {
			item.emplace(std::move(_items.front()));
			_items.pop_front();
		} else {
			item.emplace(std::move(_items.back()));
			_items.pop_back();
		}
		return item;
	}

	bool empty() const noexcept { return _items.empty(); }
	std::size_t size() const noexcept { return _items.size(); }
	PolicyKind kind() const noexcept { return _kind; }

private:
	PolicyKind _kind;
	std::deque<T> _items;
};

} // namespace taskforge::sched
