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

import numpy as np
import pytest

import toolvis


def pattern(w=6, h=4):
    ys, xs = np.mgrid[0:h, 0:w]
    return np.stack([xs * 20 + 1, ys * 40 + 3, (xs + 2 * ys) * 9], axis=-1).astype(np.uint8)


def test_numpy_round_trip_and_transforms():
    arr = pattern()
    img = toolvis.Raster.from_numpy(arr)
    assert (img.width, img.height) == (6, 4)
    np.testing.assert_array_equal(img.to_numpy(), arr)
    rot = toolvis.apply_transform(img, "rot90")
    np.testing.assert_array_equal(rot.to_numpy(), np.rot90(arr, k=-1))
    assert toolvis.detect_transform(img, rot) == ["rot90"]
    back = toolvis.apply_transform(rot, toolvis.inverse("rot90"))
    assert back == img


def test_crop_and_iou():
    img = toolvis.Raster.from_numpy(pattern())
    np.testing.assert_array_equal(toolvis.crop(img, (1, 1, 4, 3)).to_numpy(), pattern()[1:3, 1:4])
    with pytest.raises(toolvis.ToolvisError) as err:
        toolvis.crop(img, (0, 0, 9, 9))
    assert err.value.code
    assert toolvis.iou((0, 0, 2, 2), (1, 0, 3, 2)) == pytest.approx(1 / 3)


def test_execute_success_and_failure():
    img = toolvis.Raster.from_numpy(pattern())
    ok = toolvis.execute("rotate90() | grayscale()", img)
    assert ok["ok"] and ok["applied"] == ["rotate90", "grayscale"]
    assert ok["feedback"] == "EXEC OK applied=[rotate90, grayscale]"
    bad = toolvis.execute("rotate90() | crop(x0=1", img)
    assert not bad["ok"] and bad["kind"] == "ParseError"
    assert "crop" in bad["message"]
    assert toolvis.normalize_program("crop(x0=1,y0=2,x1=3,y1=4)|sharpen()") == (
        "crop(x0=1, y0=2, x1=3, y1=4) | sharpen()"
    )
    assert toolvis.parse("blur(radius=3)") == [("blur", {"radius": 3})]


def test_oracle_scores_closed_form():
    tasks = toolvis.gen_tasks(10, seed=3)
    assert len(tasks) == 10
    for task in tasks:
        traj = toolvis.run_policy(task, "oracle")
        b = toolvis.score(traj, task)
        expected = 2.6 if task.s_req else 1.1
        assert b["total"] == pytest.approx(expected, abs=1e-9)
        hacker = toolvis.score(toolvis.run_policy(task, "reward-hacker"), task)
        assert hacker["total"] < b["total"]


def test_episode_and_store(tmp_path):
    task = toolvis.gen_tasks(1, seed=5, config="p_single_tool=1,p_multi_tool=0,p_multi_crop=0,"
                                              "p_error_handling=0,p_no_tool=0")[0]
    env = toolvis.Environment()
    ep = env.reset(task)
    feedback, image, done = ep.step("<think>t</think>\n<answer>" + task.gold_answer + "</answer>")
    assert done and feedback == "ANSWER RECEIVED"
    assert ep.trajectory.termination == "answered"
    toolvis.write_tasks(tmp_path / "tasks.jsonl", [task])
    (again,) = toolvis.read_tasks(tmp_path / "tasks.jsonl")
    assert again.id == task.id and again.initial_image == task.initial_image


def test_group_helpers():
    assert toolvis.necessity_reward([1, 1, 1, 0, 1, 0, 0, 0], [True] * 4 + [False] * 4) == 0.5
    assert toolvis.difficulty_filter([True, False]) and not toolvis.difficulty_filter([True, True])
    assert toolvis.sha256_hex(b"abc").startswith("ba7816bf")


def test_raster_constructor_and_ppm():
    img = toolvis.Raster(3, 2, (1, 2, 3))
    assert img.pixel(2, 1) == (1, 2, 3)
    assert toolvis.decode_ppm(toolvis.encode_ppm(img)) == img
    assert len(toolvis.tool_names()) == 12
