import pytest

from fgs.assets import TASKS, load_task, task_for_scenario
from fgs.errors import ConfigError
from fgs.scenario import TOOL_TABLE
from fgs.search import SearchConfig, search


@pytest.mark.parametrize("task_id", sorted(TASKS))
def test_bundled_task_loads_and_solves(task_id):
    task = TASKS[task_id]
    domain, problem, gp = load_task(task_id)
    assert domain.name == problem.domain_name

    # ten numbered candidate objects plus the task's own constants
    tool_parts = [name for name, typ in problem.objects if typ == "tool-part"]
    assert tool_parts == [f"obj{i}" for i in range(10)]
    assert len(problem.objects) > 10

    join_names = {TOOL_TABLE[t].join_action_name for t in task.tools}
    for schema in domain.action_schemas:
        if schema.name in join_names:
            assert len(schema.object_param_indices) == 2
        else:
            assert schema.object_param_indices == ()
    # each join grounds to the full ordered-pair space
    for name in join_names:
        assert sum(1 for a in gp.actions if a.schema_name == name) == 90

    result = search(gp, SearchConfig(algorithm="astar", heuristic="ff"))
    assert result.found
    joins = [a for a in result.plan if a.o_a]
    assert len(joins) == 1
    tool = next(t for t in task.tools if TOOL_TABLE[t].join_action_name == joins[0].schema_name)
    use = TOOL_TABLE[tool].use_action
    assert any(a.schema_name == use for a in result.plan)


def test_task_lookup_by_scenario_shape():
    assert task_for_scenario("cooking", ("spatula",)).task_id == "cooking_spatula"
    assert task_for_scenario("cooking", ("ladle", "spatula")).task_id == "cooking_either"
    with pytest.raises(ConfigError):
        task_for_scenario("cooking", ("rake",))


def test_data_dir_override(tmp_path, monkeypatch):
    monkeypatch.setenv("FGS_DATA_DIR", str(tmp_path))
    with pytest.raises(ConfigError, match="missing bundled domain assets"):
        load_task("cooking_spatula")
