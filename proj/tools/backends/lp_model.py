"""Parser for the LP subset written by the transit-so model exporter.

Returns a dict with variable names/bounds/integrality and the constraint
matrix split into equalities and inequalities (<= form).
"""


def _tokens(text):
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        yield line


def parse_lp(text):
    section = None
    objective_body = []
    constraint_rows = []  # (name, body)
    bounds = []
    generals = []

    pending = None
    for line in _tokens(text):
        lower = line.lower()
        if lower in ("minimize", "min"):
            section = "obj"
            continue
        if lower in ("subject to", "st", "s.t."):
            section = "con"
            pending = None
            continue
        if lower == "bounds":
            section = "bounds"
            pending = None
            continue
        if lower in ("generals", "general", "integers"):
            section = "gen"
            continue
        if lower == "end":
            break
        if section == "obj":
            body = line.split(":", 1)[1] if ":" in line else line
            objective_body.append(body)
        elif section == "con":
            if ":" in line:
                name, body = line.split(":", 1)
                constraint_rows.append([name.strip(), body])
                pending = constraint_rows[-1]
            elif pending is not None:
                pending[1] += " " + line
        elif section == "bounds":
            parts = line.split()
            if len(parts) != 5 or parts[1] != "<=" or parts[3] != "<=":
                raise ValueError("unsupported bound line: " + line)
            bounds.append((float(parts[0]), parts[2], float(parts[4])))
        elif section == "gen":
            generals.extend(line.split())

    var_ids = {}
    var_names = []

    def var_id(name):
        if name not in var_ids:
            var_ids[name] = len(var_names)
            var_names.append(name)
        return var_ids[name]

    def parse_expr(body):
        terms = {}
        sign = 1.0
        coef = None
        for tok in body.split():
            if tok == "+":
                sign = 1.0
                continue
            if tok == "-":
                sign = -1.0
                continue
            try:
                coef = float(tok)
                continue
            except ValueError:
                pass
            value = sign * (coef if coef is not None else 1.0)
            if not (tok == "zero_pad" and value == 0):
                v = var_id(tok)
                terms[v] = terms.get(v, 0.0) + value
            sign, coef = 1.0, None
        return terms

    objective = parse_expr(" ".join(objective_body))

    eq_rows, ineq_rows = [], []  # (terms, rhs); ineq in <= form
    for name, body in constraint_rows:
        if "<=" in body:
            lhs, rhs = body.split("<=")
            ineq_rows.append((parse_expr(lhs), float(rhs)))
        elif ">=" in body:
            lhs, rhs = body.split(">=")
            terms = parse_expr(lhs)
            ineq_rows.append(({v: -c for v, c in terms.items()}, -float(rhs)))
        elif "=" in body:
            lhs, rhs = body.split("=")
            eq_rows.append((parse_expr(lhs), float(rhs)))
        else:
            raise ValueError("constraint without relation: " + name)

    lb = [0.0] * len(var_names)
    ub = [float("inf")] * len(var_names)
    for low, name, high in bounds:
        v = var_id(name)
        if v >= len(lb):
            lb.extend([0.0] * (v + 1 - len(lb)))
            ub.extend([float("inf")] * (v + 1 - len(ub)))
        lb[v], ub[v] = low, high
    integer = [False] * len(var_names)
    for name in generals:
        integer[var_id(name)] = True

    return {
        "var_names": var_names,
        "objective": objective,
        "eq_rows": eq_rows,
        "ineq_rows": ineq_rows,
        "lb": lb,
        "ub": ub,
        "integer": integer,
    }


def write_solution(path, status, objective, names, values):
    with open(path, "w") as out:
        out.write("status %s\n" % status)
        if objective is not None:
            out.write("objective %.9f\n" % objective)
        if values is not None:
            for name, value in zip(names, values):
                out.write("%s %.9f\n" % (name, value))
