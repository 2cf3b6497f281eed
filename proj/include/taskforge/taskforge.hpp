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

#include "taskforge/platform.hpp"
#include "taskforge/sync/partitioned_ticket_lock.hpp"
#include "taskforge/sync/delegation_ticket_lock.hpp"
#include "taskforge/sync/spsc_queue.hpp"
#include "taskforge/deps/access_flags.hpp"
#include "taskforge/deps/data_access.hpp"
#include "taskforge/deps/dependency_engine.hpp"
#include "taskforge/sched/ready_queue.hpp"
#include "taskforge/sched/scheduler.hpp"
#include "taskforge/task.hpp"
#include "taskforge/runtime/config.hpp"
#include "taskforge/runtime/runtime.hpp"
#include "taskforge/trace/trace_format.hpp"
#include "taskforge/trace/trace_buffer.hpp"
#include "taskforge/trace/dump.hpp"
