import json
import math

import pytest

import procrastinate as p


def close(a, b, rel):
    return abs(float(a) - float(b)) <= rel * max(abs(float(b)), 1.0)


def test_work_and_completion_are_inverse():
    job = {"release": "0", "due": "4", "work": "1"}
    assert p.work_in(job, "0", "2") == "2"
    assert close(p.completion_from(job, "0", "2"), math.sqrt(4), 1e-15)
    assert close(p.completion_from(job, "1", "1"), math.sqrt(3), 1e-15)
    assert p.work_in(job, "0", "4", cap="1") == "3.5"


def test_solve_single_job_without_slack():
    inst = {"schema_version": 1, "jobs": [{"id": 1, "release": "0", "due": "2", "work": "2"}]}
    sched = p.solve(inst)
    assert sched["verdict"]["status"] == "feasible"
    assert len(sched["segments"]) == 1


def test_solve_reduction_verdicts():
    assert p.solve(p.reduce_ssr([2, 3], 3))["verdict"]["status"] == "feasible"
    assert p.solve(p.reduce_ssr([2, 3], 4))["verdict"]["status"] == "infeasible"
    assert p.check_reduction([1, 4, 9], 6)[0] == "feasible"
    assert p.check_reduction([1000001, 1000001], 2001, bits=24)[0] == "indeterminate"


@pytest.mark.parametrize("n", [3, 5, 10])
def test_lssf_family(n):
    trace = p.simulate(p.gen_lssf(n), "lssf")
    assert close(trace["summary"]["max_stretch"], math.sqrt(n - 1), 1e-9)


def test_srpt_family():
    trace = p.simulate(p.gen_srpt(16), "srpt")
    job1 = next(j for j in trace["summary"]["jobs"] if j["id"] == 1)
    assert close(job1["stretch"], math.sqrt(17) / 2, 1e-12)


def test_thrashing_on_random_instances():
    for seed in range(1, 21):
        inst = p.gen_random_feasible(1 + seed % 8, seed)
        for cap in (None, "2"):
            trace = p.simulate(inst, "thrashing", cap=cap)
            assert float(trace["summary"]["max_stretch"]) <= 4
            p._core.check_trace(json.dumps(trace))


def test_fifo_and_edd_targets():
    assert float(p.simulate(p.gen_fifo(10), "fifo")["summary"]["max_stretch"]) >= 10
    assert float(p.simulate(p.gen_edd(10), "edd")["summary"]["max_stretch"]) >= 10


def test_adversary_defeats_every_policy():
    for policy in ("fifo", "edd", "srpt", "lssf", "thrashing"):
        instance, trace, missed = p.adaptive_adversary(policy)
        assert missed
        assert trace["summary"]["missed_due_dates"]
        assert p.solve(instance)["verdict"]["status"] == "feasible"


def test_errors():
    with pytest.raises(p.ParseError):
        p.solve("{not json")
    with pytest.raises(p.ParameterError):
        p.simulate(p.gen_lssf(3), "lifo")
    with pytest.raises(p.ParameterError):
        p.gen_lssf(1)
    with pytest.raises(ValueError):
        p.work_in({"release": "0", "due": "1", "work": "1"}, "-1", "0")
