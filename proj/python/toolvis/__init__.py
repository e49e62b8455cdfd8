# Copyright 2026 The Toolvis Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the toolvis C++ library."""

from toolvis._core import (
    Environment,
    Episode,
    Raster,
    TaskSpec,
    ToolvisError,
    Trajectory,
    adjust_brightness,
    adjust_contrast,
    apply_transform,
    box_blur,
    crop,
    decode_ppm,
    describe_tools,
    detect_transform,
    difficulty_filter,
    edge_detect,
    encode_ppm,
    execute,
    gen_tasks,
    inverse,
    iou,
    necessity_reward,
    normalize_program,
    parse,
    policy_names,
    read_tasks,
    run_policy,
    run_self_checks,
    score,
    sha256_hex,
    sharpen,
    to_grayscale,
    tool_names,
    transforms,
    write_tasks,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
