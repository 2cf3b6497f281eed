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

#include <cstdint>
#include <new>
#include <utility>
#include <vector>

namespace taskforge {

//! Single-owner freelist of raw blocks sized for T.
//!
//! Blocks are interchangeable between pools: an object created from one pool
//! may be destroyed into another, which then recycles the block.
template <typename T>
class ObjectPool {
public:
	ObjectPool() = default;
	ObjectPool(const ObjectPool &) = delete;
	ObjectPool &operator=(const ObjectPool &) = delete;

	~ObjectPool()
	{
		for (void *block : _free)
			::operator delete(block, std::align_val_t(alignof(T)));
	}

	template <typename... Args>
	T *create(Args &&...args)
	{
		void *block;
		if (_free.empty()) {
			block = ::operator new(sizeof(T), std::align_val_t(alignof(T)));
		} else {
			block = _free.back();
			_free.pop_back();
		}
		++_created;
		return new (block) T(std::forward<Args>(args)...);
	}

	void destroy(T *object)
	{
		object->~T();
		_free.push_back(object);
		++_destroyed;
	}

	std::uint64_t created() const noexcept { return _created; }
	std::uint64_t destroyed() const noexcept { return _destroyed; }
	std::size_t cached() const noexcept { return _free.size(); }

private:
	std::vector<void *> _free;
	std::uint64_t _created = 0;
	std::uint64_t _destroyed = 0;
};

} // namespace taskforge
