"""Source-code generation backends.

The bundled ``python`` backend emits a single self-contained module exposing
the familiar reset/step environment interface (discrete action index in,
observation/reward/done out); its behavior matches the interpreter exactly
for integer variables and to 1e-9 for reals.
"""

from __future__ import annotations

from typing import Callable

from . import expr as E
from .errors import InvalidSpec, UnknownBackend
from .model import GymSpec
from .validate import validate

Backend = Callable[[GymSpec], str]

_BACKENDS: dict[str, Backend] = {}


def register_backend(name: str, backend: Backend) -> None:
    _BACKENDS[name] = backend


def backends() -> list[str]:
    return sorted(_BACKENDS)


def generate_source(spec: GymSpec, backend: str = "python") -> str:
    """Emit environment source for a registered backend."""
    if backend not in _BACKENDS:
        raise UnknownBackend(f"no backend named {backend!r}; registered: {backends()}")
    report = validate(spec)
    if not report.ok:
        raise InvalidSpec(f"spec has {len(report.findings)} finding(s): {report.codes()}")
    return _BACKENDS[backend](spec)


# --- Python backend ----------------------------------------------------


def _py_expr(expr: E.Expr, env: str) -> str:
    """Render an expression tree as a Python expression reading from `env`."""
    if isinstance(expr, E.Literal):
        if isinstance(expr.value, bool):
            return "True" if expr.value else "False"
        return E.format_number(expr.value)
    if isinstance(expr, E.Name):
        return f"{env}[{expr.ident!r}]"
    if isinstance(expr, E.Unary):
        inner = _py_expr(expr.operand, env)
        return f"(not {inner})" if expr.op == "not" else f"(-{inner})"
    if isinstance(expr, E.Binary):
        left = _py_expr(expr.left, env)
        right = _py_expr(expr.right, env)
        if expr.op == "/":
            return f"_div({left}, {right})"
        return f"({left} {expr.op} {right})"
    if isinstance(expr, E.Call):
        args = ", ".join(_py_expr(a, env) for a in expr.args)
        return f"{expr.func}({args})"
    if isinstance(expr, E.If):
        cond = _py_expr(expr.cond, env)
        then = _py_expr(expr.then, env)
        orelse = _py_expr(expr.orelse, env)
        return f"({then} if {cond} else {orelse})"
    raise TypeError(f"not an expression node: {expr!r}")


def _python_backend(spec: GymSpec) -> str:
    actions = spec.expanded_actions()
    var_names = [v.name for v in spec.state_vars]
    param_names = sorted({p.name for a in spec.actions for p in a.params})

    lines: list[str] = []
    w = lines.append
    w('"""Environment module generated from a declarative gym definition.')
    w("")
    w(f"Gym: {spec.name}")
    if spec.description:
        w(f"{spec.description}")
    w("")
    w("Exposes reset() -> observation and step(action_index) ->")
    w("(observation, reward, done, info). Observations are lists ordered as")
    w("STATE_VARS; actions are indices into ACTIONS.")
    w('"""')
    w("")
    w("import math")
    w("")
    w(f"STATE_VARS = {var_names!r}")
    w(f"ACTIONS = {[a.label for a in actions]!r}")
    w(f"MAX_STEPS = {spec.max_steps}")
    w("")
    w("_BOUNDS = {")
    for v in spec.state_vars:
        w(
            f"    {v.name!r}: ({E.format_number(v.lower)}, "
            f"{E.format_number(v.upper)}, {v.kind == 'integer'!r}),"
        )
    w("}")
    w("")
    w("_INITIAL = {")
    for name, value in spec.initial_state:
        w(f"    {name!r}: {E.format_number(float(value))},")
    w("}")
    w("")
    w("")
    w("def _div(a, b):")
    w("    if b == 0:")
    w("        raise ZeroDivisionError('division by zero in gym expression')")
    w("    return a / b")
    w("")
    w("")
    w("def _clamp(name, value):")
    w("    lower, upper, is_int = _BOUNDS[name]")
    w("    if is_int:")
    w("        value = float(math.floor(value + 0.5) if value >= 0 else math.ceil(value - 0.5))")
    w("    return float(min(max(value, lower), upper))")
    w("")

    # per-action update functions; all reads go against the pre-step env
    for idx, action in enumerate(actions):
        w("")
        w(f"def _apply_{idx}(env):")
        w(f"    # action: {action.label}")
        for k, v in action.env().items():
            w(f"    env[{k!r}] = {E.format_number(v)}")
        w("    out = {}")
        for rule in spec.rules_for(action.name):
            for var, expression in rule.assignments:
                w(f"    out[{var!r}] = {_py_expr(expression, 'env')}")
        w("    return out")
    w("")
    w("")
    w(f"_APPLY = [{', '.join(f'_apply_{i}' for i in range(len(actions)))}]")
    w(f"_PARAM_NAMES = {param_names!r}")
    w("_ACTION_BINDINGS = [")
    for action in actions:
        w(f"    {dict(action.bindings)!r},")
    w("]")
    w("")
    w("_state = None")
    w("_step = 0")
    w("_done = True")
    w("")
    w("")
    w("def reset():")
    w('    """Return the initial observation; call before the first step."""')
    w("    global _state, _step, _done")
    w("    _state = {name: float(_INITIAL[name]) for name in STATE_VARS}")
    w("    _step = 0")
    w("    _done = False")
    w("    return [_state[name] for name in STATE_VARS]")
    w("")
    w("")
    w("def step(action):")
    w('    """Apply one action index; returns (observation, reward, done, info)."""')
    w("    global _state, _step, _done")
    w("    if _state is None:")
    w("        raise RuntimeError('call reset() first')")
    w("    if _done:")
    w("        raise RuntimeError('episode finished; call reset()')")
    w("    if not 0 <= action < len(ACTIONS):")
    w("        raise ValueError('unknown action index %r' % (action,))")
    w("    env = dict(_state)")
    w("    env['step'] = float(_step)")
    w("    updates = _APPLY[action](env)")
    w("    merged = dict(_state)")
    w("    merged.update(updates)")
    w("    new_state = {name: _clamp(name, float(merged[name])) for name in STATE_VARS}")
    w("    _step += 1")
    w("    menv = dict(new_state)")
    w("    menv['step'] = float(_step)")
    w("    for name in _PARAM_NAMES:")
    w("        menv[name] = 0.0")
    w("    menv.update(_ACTION_BINDINGS[action])")
    w("    metrics = {}")
    w("    reward = 0.0")
    for metric in spec.reward_metrics:
        w(f"    metrics[{metric.name!r}] = float({_py_expr(metric.expression, 'menv')})")
        w(f"    reward += {E.format_number(metric.weight)} * metrics[{metric.name!r}]")
    w("    tenv = dict(new_state)")
    w("    tenv['step'] = float(_step)")
    w(f"    terminated = bool({_py_expr(spec.termination, 'tenv')})")
    w("    _done = terminated or _step >= MAX_STEPS")
    w("    _state = new_state")
    w("    info = {'metrics': metrics, 'state': dict(new_state), 'step': _step}")
    w("    return [new_state[name] for name in STATE_VARS], reward, _done, info")
    w("")
    return "\n".join(lines) + "\n"


register_backend("python", _python_backend)
