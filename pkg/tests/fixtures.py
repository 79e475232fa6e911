"""Shared fixture programs and suite builders.

The bit-count programs mirror the worked repair examples: an incorrect
submission, the small repair the tool should find, and the user's own larger
fix.  Answers for every suite are computed here in Python, independently of
any C execution.
"""

from __future__ import annotations

from pathlib import Path

from clef.judge import ResourceLimits, TestCase, TestSuite, save_suite

# ---------------------------------------------------------------------------
# Worked example 1: set-bit counting, loop written as a conditional.

_BITS_BODY = """
int main()
{{
    int x;
    int c = 0;
    scanf("%d", &x);
    {kw} ((x / 2) != 0)
    {{
        if ((x % 2) != 0)
            c++;
        x = x / 2;
    }}
    printf("%d\\n", c + 1);
    return 0;
}}
"""

FIG2A = "#include <stdio.h>\n" + _BITS_BODY.format(kw="if")
FIG2B = "#include <stdio.h>\n" + _BITS_BODY.format(kw="while")

# The author's own later fix: new loop guard, and the inner guard reads a
# different (undeclared) variable exactly as submitted.
FIG2C = """#include <stdio.h>
int main()
{
    int x;
    int c = 0;
    scanf("%d", &x);
    while (x)
    {
        if ((X % 2) != 0)
            c++;
        x = x / 2;
    }
    printf("%d\\n", c + 1);
    return 0;
}
"""

# Excerpt variants without the input call, for structural assertions.
FIG2A_EXCERPT = "int main()\n{\n    int x;\n    int c = 0;\n" + (
    "    if ((x / 2) != 0)\n    {\n        if ((x % 2) != 0)\n            c++;\n"
    "        x = x / 2;\n    }\n    printf(\"%d\\n\", c + 1);\n    return 0;\n}\n"
)
FIG2B_EXCERPT = FIG2A_EXCERPT.replace("if ((x / 2) != 0)", "while ((x / 2) != 0)", 1)

# ---------------------------------------------------------------------------
# Worked example 2: correct loop, inverted guard inside it.

_BITS3_BODY = """
int main()
{{
    int x;
    int u = 0;
    scanf("%d", &x);
    while (x > 0)
    {{
        if ({guard})
            u++;
        x = x / 2;
    }}
    printf("%d\\n", u);
    return 0;
}}
"""

FIG3A = "#include <stdio.h>\n" + _BITS3_BODY.format(guard="x % 2 == 0")
FIG3B = "#include <stdio.h>\n" + _BITS3_BODY.format(guard="x % 2")

FIG3C = """#include <stdio.h>
int main()
{
    int x;
    int u = 0;
    scanf("%d", &x);
    while (x != 0)
    {
        u += x % 2;
        x /= 2;
    }
    printf("%d\\n", u);
    return 0;
}
"""


def popcount_cases() -> list[tuple[bytes, bytes]]:
    inputs = [1, 3, 12, 1000000000]
    return [(f"{x}\n".encode(), f"{bin(x).count('1')}\n".encode()) for x in inputs]


def bit_count_suite(time_ms: int = 2000, memory_kb: int = 262144) -> TestSuite:
    cases = tuple(
        TestCase(i, inp, out) for i, (inp, out) in enumerate(popcount_cases(), start=1)
    )
    return TestSuite(cases, ResourceLimits(time_ms, memory_kb))


# ---------------------------------------------------------------------------
# Odd-divisor problem: correct-but-exhaustive vs. shift-based solutions.

ODD_DIVISOR_EXHAUSTIVE = """#include <stdio.h>
int main()
{
    unsigned long long n;
    unsigned long long i;
    scanf("%llu", &n);
    for (i = 3; i <= n; i += 2)
    {
        if (n % i == 0)
        {
            printf("YES\\n");
            return 0;
        }
    }
    printf("NO\\n");
    return 0;
}
"""

ODD_DIVISOR_SHIFT = """#include <stdio.h>
int main()
{
    unsigned long long n;
    scanf("%llu", &n);
    while (!(n & 1))
        n >>= 1;
    if (n == 1)
        printf("NO\\n");
    else
        printf("YES\\n");
    return 0;
}
"""


def odd_divisor_suite(time_ms: int = 2000, memory_kb: int = 262144) -> TestSuite:
    def answer(n: int) -> bytes:
        return b"NO\n" if (n & (n - 1)) == 0 else b"YES\n"

    # test 1 is instant for both solutions; test 2 needs ~n/2 iterations from
    # the exhaustive search
    inputs = [3, 1 << 46]
    cases = tuple(
        TestCase(i, f"{n}\n".encode(), answer(n)) for i, n in enumerate(inputs, start=1)
    )
    return TestSuite(cases, ResourceLimits(time_ms, memory_kb))


# ---------------------------------------------------------------------------
# Judge taxonomy programs (only compiled and executed, never parsed).

TAXONOMY_AC = """#include <stdio.h>
int main(){ int a,b; scanf("%d %d",&a,&b); printf("%d\\n", a+b); return 0; }
"""
TAXONOMY_WA = """#include <stdio.h>
int main(){ int a,b; scanf("%d %d",&a,&b); printf("%d\\n", a+b+(a>3)); return 0; }
"""
TAXONOMY_TLE = """#include <stdio.h>
int main(){ int a,b; scanf("%d %d",&a,&b); for(;;){} return 0; }
"""
TAXONOMY_MLE = """#include <stdio.h>
#include <stdlib.h>
int main(){
    int a,b; scanf("%d %d",&a,&b);
    size_t n = 300u*1024*1024;
    volatile char *p = malloc(n);
    if(!p){ printf("%d\\n", a+b); return 0; }
    for(size_t i = 0; i < n; i += 4096) p[i] = (char)i;
    long s = 0;
    for(size_t i = 0; i < n; i += 1024*1024) s += p[i];
    printf("%d\\n", (int)(a+b+(s&0)));
    return 0;
}
"""
TAXONOMY_RE = """#include <stdio.h>
int main(){ int a,b; scanf("%d %d",&a,&b); printf("%d\\n", a/(b-b)); return 0; }
"""
TAXONOMY_CE = """#include <stdio.h>
int main(){ int a,b; scanf("%d %d",&a,&b); printf("%d\\n", a+b) return 0; }
"""


def sum_suite(time_ms: int = 2000, memory_kb: int = 262144) -> TestSuite:
    pairs = [(1, 2), (3, 4), (5, 9)]
    cases = tuple(
        TestCase(i, f"{a} {b}\n".encode(), f"{a + b}\n".encode())
        for i, (a, b) in enumerate(pairs, start=1)
    )
    return TestSuite(cases, ResourceLimits(time_ms, memory_kb))


# ---------------------------------------------------------------------------
# Self-repair scenario table: (name, incorrect, correct, cases, time_ms).
# Each suite's expected outputs come from the Python reference next to it.


def _cases(inputs: list[int], ref) -> list[tuple[bytes, bytes]]:
    return [(f"{n}\n".encode(), f"{ref(n)}\n".encode()) for n in inputs]


_SUM_TO_N = """#include <stdio.h>
int main()
{
    int n;
    int i;
    int s = 0;
    scanf("%d", &n);
    for (i = 1; i {op} n; i++)
        s = s + i;
    printf("%d\\n", s);
    return 0;
}
"""

_POPCOUNT_GUARD = """#include <stdio.h>
int main()
{
    int v;
    int ones = 0;
    scanf("%d", &v);
    while (v > 0)
    {
        if (v % 2 {op} 0)
            ones++;
        v = v / 2;
    }
    printf("%d\\n", ones);
    return 0;
}
"""

_POPCOUNT_BOUND = """#include <stdio.h>
int main()
{
    int v;
    int ones = 0;
    scanf("%d", &v);
    while (v > {bound})
    {
        ones = ones + v % 2;
        v = v / 2;
    }
    printf("%d\\n", ones);
    return 0;
}
"""

_MULTIPLES = """#include <stdio.h>
int main()
{
    int n;
    int i;
    int k = 0;
    scanf("%d", &n);
    for (i = 1; i <= n; i++)
    {
        if (i % 3 == {rem})
            k++;
    }
    printf("%d\\n", k);
    return 0;
}
"""

_FACTORIAL = """#include <stdio.h>
int main()
{
    int n;
    int i;
    long long f = 1;
    scanf("%d", &n);
    for (i = 2; i {op} n; i++)
        f = f * i;
    printf("%lld\\n", f);
    return 0;
}
"""

_POPCOUNT_MISSING_STEP = """#include <stdio.h>
int main()
{
    int v;
    int ones = 0;
    scanf("%d", &v);
    while (v > 0)
    {
        ones = ones + v % 2;{step}
    }
    printf("%d\\n", ones);
    return 0;
}
"""

_DIGITSUM_MISSING_ADD = """#include <stdio.h>
int main()
{
    int n;
    int s = 0;
    scanf("%d", &n);
    while (n > 0)
    {{ADD}
        n = n / 10;
    }
    printf("%d\\n", s);
    return 0;
}
"""

_COUNT_PLUS_ONE = """#include <stdio.h>
int main()
{
    int x;
    int c = 0;
    scanf("%d", &x);
    while ((x / 2) != 0)
    {
        if ((x % 2) != 0)
            c++;
        x = x / 2;
    }{FIX}
    printf("%d\\n", c);
    return 0;
}
"""

_DECL_INIT = """#include <stdio.h>
int main()
{
    int n;
    int i;
    int s{init};
    scanf("%d", &n);
    for (i = 1; i <= n; i++)
        s = s + i * i;
    printf("%d\\n", s);
    return 0;
}
"""

_ABS_GUARD = """#include <stdio.h>
int main()
{
    int n;
    int d = 0;
    scanf("%d", &n);{NORM}
    while (n > 0)
    {
        d++;
        n = n / 10;
    }
    printf("%d\\n", d);
    return 0;
}
"""

_EXTRA_INC = """#include <stdio.h>
int main()
{
    int v;
    int ones = 0;
    scanf("%d", &v);
    while (v > 0)
    {
        ones = ones + v % 2;
        v = v / 2;
    }{EXTRA}
    printf("%d\\n", ones);
    return 0;
}
"""

_EXTRA_PREP = """#include <stdio.h>
int main()
{
    int n;
    int s = 0;
    int i;
    scanf("%d", &n);{EXTRA}
    for (i = 1; i <= n; i++)
        s = s + i;
    printf("%d\\n", s);
    return 0;
}
"""

_EXTRA_SCALE = """#include <stdio.h>
int main()
{
    int n;
    int i;
    int s = 0;
    scanf("%d", &n);
    for (i = 1; i <= n; i++)
        s = s + i;{EXTRA}
    printf("%d\\n", s);
    return 0;
}
"""

_EXTRA_PRINT = """#include <stdio.h>
int main()
{
    int n;
    int t = 0;
    scanf("%d", &n);
    while (n > 0)
    {
        t = t + n % 10;
        n = n / 10;
    }{EXTRA}
    printf("%d\\n", t);
    return 0;
}
"""

_EXTRA_DECR = """#include <stdio.h>
int main()
{
    int n;
    int p = 1;
    int i;
    scanf("%d", &n);{EXTRA}
    for (i = 0; i < n; i++)
        p = p * 2;
    printf("%d\\n", p);
    return 0;
}
"""

_IF_LOOP_DIGITS = """#include <stdio.h>
int main()
{
    int m;
    int cnt = 0;
    scanf("%d", &m);
    {kw} (m > 0)
    {
        cnt++;
        m = m / 10;
    }
    printf("%d\\n", cnt);
    return 0;
}
"""

_IF_LOOP_SUM = """#include <stdio.h>
int main()
{
    int q;
    int total = 0;
    scanf("%d", &q);
    {kw} (q > 0)
    {
        total = total + q;
        q = q - 1;
    }
    printf("%d\\n", total);
    return 0;
}
"""

_FOR_VS_WHILE = """#include <stdio.h>
int main()
{
    int n;
    int s = 0;
    scanf("%d", &n);
    {LOOP}
    printf("%d\\n", s);
    return 0;
}
"""

_SQRT_COUNT_WHILE = """#include <stdio.h>
int main()
{
    int n;
    int i = 1;
    int c = 0;
    scanf("%d", &n);
    {LOOP}
    printf("%d\\n", c);
    return 0;
}
"""

_MAX_OF_TWO = """#include <stdio.h>
int main()
{
    int a;
    int b;
    scanf("%d %d", &a, &b);
    if (a > b)
        printf("%d\\n", a);{ELSE}
    return 0;
}
"""


def _digit_count(n: int) -> int:
    return len(str(abs(n))) if n != 0 else 0


def self_repair_scenarios() -> list[dict]:
    """Twenty (incorrect, correct) pairs with per-pair suites.

    Covers guard mutations, statement insertion and deletion, and
    if/while/for control-flow rewrites.
    """
    s: list[dict] = []

    def add(name, bug, fix, cases, time_ms=2000):
        s.append(
            {"name": name, "incorrect": bug, "correct": fix, "cases": cases, "time_ms": time_ms}
        )

    # guard mutations
    add(
        "guard-sum-bound",
        _SUM_TO_N.replace("{op}", "<"),
        _SUM_TO_N.replace("{op}", "<="),
        _cases([1, 4, 10], lambda n: n * (n + 1) // 2),
    )
    add(
        "guard-popcount-parity",
        _POPCOUNT_GUARD.replace("{op}", "=="),
        _POPCOUNT_GUARD.replace("{op}", "!="),
        _cases([1, 6, 11], lambda n: bin(n).count("1")),
    )
    add(
        "guard-popcount-lowbit",
        _POPCOUNT_BOUND.replace("{bound}", "1"),
        _POPCOUNT_BOUND.replace("{bound}", "0"),
        _cases([1, 5, 8], lambda n: bin(n).count("1")),
    )
    add(
        "guard-multiples-rem",
        _MULTIPLES.replace("{rem}", "1"),
        _MULTIPLES.replace("{rem}", "0"),
        _cases([2, 9, 10], lambda n: n // 3),
    )
    add(
        "guard-factorial-bound",
        _FACTORIAL.replace("{op}", "<"),
        _FACTORIAL.replace("{op}", "<="),
        _cases([1, 4, 6], lambda n: __import__("math").factorial(n)),
    )

    # statement insertion (the fix adds a statement)
    add(
        "insert-loop-step",
        _POPCOUNT_MISSING_STEP.replace("{step}", ""),
        _POPCOUNT_MISSING_STEP.replace("{step}", "\n        v = v / 2;"),
        _cases([1, 6, 13], lambda n: bin(n).count("1")),
        time_ms=500,
    )
    add(
        "insert-accumulate",
        _DIGITSUM_MISSING_ADD.replace("{ADD}", ""),
        _DIGITSUM_MISSING_ADD.replace("{ADD}", "\n        s = s + n % 10;"),
        _cases([5, 47, 928], lambda n: sum(int(d) for d in str(n))),
    )
    add(
        "insert-final-adjust",
        _COUNT_PLUS_ONE.replace("{FIX}", ""),
        _COUNT_PLUS_ONE.replace("{FIX}", "\n    c = c + 1;"),
        _cases([1, 5, 12], lambda n: bin(n).count("1")),
    )
    add(
        "insert-decl-init",
        _DECL_INIT.replace("{init}", ""),
        _DECL_INIT.replace("{init}", " = 0"),
        _cases([1, 3, 5], lambda n: sum(i * i for i in range(1, n + 1))),
    )
    add(
        "insert-negative-guard",
        _ABS_GUARD.replace("{NORM}", ""),
        _ABS_GUARD.replace("{NORM}", "\n    if (n < 0)\n        n = -n;"),
        [(b"-450\n", b"3\n"), (b"7\n", b"1\n"), (b"-3\n", b"1\n")],
    )

    # statement deletion (the fix removes a statement)
    add(
        "delete-extra-increment",
        _EXTRA_INC.replace("{EXTRA}", "\n    ones++;"),
        _EXTRA_INC.replace("{EXTRA}", ""),
        _cases([1, 6, 13], lambda n: bin(n).count("1")),
    )
    add(
        "delete-input-shift",
        _EXTRA_PREP.replace("{EXTRA}", "\n    n = n + 1;"),
        _EXTRA_PREP.replace("{EXTRA}", ""),
        _cases([1, 4, 10], lambda n: n * (n + 1) // 2),
    )
    add(
        "delete-result-scale",
        _EXTRA_SCALE.replace("{EXTRA}", "\n    s = s * 2;"),
        _EXTRA_SCALE.replace("{EXTRA}", ""),
        _cases([1, 4, 10], lambda n: n * (n + 1) // 2),
    )
    add(
        "delete-stray-print",
        _EXTRA_PRINT.replace("{EXTRA}", '\n    printf("%d\\n", 0);'),
        _EXTRA_PRINT.replace("{EXTRA}", ""),
        _cases([5, 47, 928], lambda n: sum(int(d) for d in str(n))),
    )
    add(
        "delete-pre-decrement",
        _EXTRA_DECR.replace("{EXTRA}", "\n    n--;"),
        _EXTRA_DECR.replace("{EXTRA}", ""),
        _cases([0, 3, 6], lambda n: 2 ** n),
    )

    # control-flow rewrites
    add(
        "rewrite-if-to-while-digits",
        _IF_LOOP_DIGITS.replace("{kw}", "if"),
        _IF_LOOP_DIGITS.replace("{kw}", "while"),
        _cases([7, 47, 1234], _digit_count),
    )
    add(
        "rewrite-if-to-while-sum",
        _IF_LOOP_SUM.replace("{kw}", "if"),
        _IF_LOOP_SUM.replace("{kw}", "while"),
        _cases([1, 3, 7], lambda n: n * (n + 1) // 2),
    )
    add(
        "rewrite-for-to-while",
        _FOR_VS_WHILE.replace(
            "{LOOP}", "for (; n > 0;)\n    {\n        s = s + n % 10;\n    }"
        ),
        _FOR_VS_WHILE.replace(
            "{LOOP}", "while (n > 0)\n    {\n        s = s + n % 10;\n        n = n / 10;\n    }"
        ),
        _cases([5, 47, 928], lambda n: sum(int(d) for d in str(n))),
        time_ms=500,
    )
    add(
        "rewrite-while-to-for",
        _SQRT_COUNT_WHILE.replace(
            "{LOOP}", "while (i * i <= n)\n    {\n        c++;\n    }"
        ),
        _SQRT_COUNT_WHILE.replace(
            "{LOOP}", "for (i = 1; i * i <= n; i++)\n    {\n        c++;\n    }"
        ),
        _cases([1, 10, 26], lambda n: __import__("math").isqrt(n)),
        time_ms=500,
    )
    add(
        "rewrite-else-branch",
        _MAX_OF_TWO.replace("{ELSE}", ""),
        _MAX_OF_TWO.replace("{ELSE}", "\n    else\n        printf(\"%d\\n\", b);"),
        [(b"5 2\n", b"5\n"), (b"2 5\n", b"5\n"), (b"4 4\n", b"4\n")],
    )
    return s


def scenario_suite(scenario: dict, memory_kb: int = 262144) -> TestSuite:
    cases = tuple(
        TestCase(i, inp, out) for i, (inp, out) in enumerate(scenario["cases"], start=1)
    )
    return TestSuite(cases, ResourceLimits(scenario["time_ms"], memory_kb))


# ---------------------------------------------------------------------------
# Corpus builders


def rename_vars(source: str, mapping: dict[str, str]) -> str:
    import re

    def sub(m):
        return mapping.get(m.group(0), m.group(0))

    return re.sub(r"\b[A-Za-z_][A-Za-z0-9_]*\b", sub, source)


UNFIXABLE = """#include <stdio.h>
int main()
{
    int z;
    scanf("%d", &z);
    printf("%d\\n", z * 2);
    return 0;
}
"""


def build_corpus(
    root: Path,
    problem_id: str,
    histories: dict[str, list[tuple[int, str, str]]],
    suite: TestSuite,
) -> Path:
    """Write a corpus directory: users/<id>/<seq>_<CODE>.c plus the test suite."""
    base = root / problem_id
    for user, submissions in histories.items():
        udir = base / "users" / user
        udir.mkdir(parents=True, exist_ok=True)
        for seq, code, source in submissions:
            (udir / f"{seq}_{code}.c").write_text(source, encoding="utf-8")
    save_suite(suite, base / "tests")
    return root


def big_synthetic_pair(n_regions: int = 8) -> tuple[str, str]:
    """Two ~200-node programs with ``n_regions`` small loop regions.

    Half the regions differ by one literal, so regional learning has real work
    to do in several places while most structure is shared.
    """
    decls = []
    loops_i = []
    loops_c = []
    for r in range(n_regions):
        decls.append(f"    int a{r} = 0;")
        decls.append(f"    int t{r} = 1;")
        body_i = [
            f"        t{r} = t{r} + {r + 1};",
            f"        t{r} = t{r} * 2;",
            f"        t{r} = t{r} - a{r};",
            f"        a{r} = a{r} + 1;",
        ]
        body_c = list(body_i)
        if r % 2 == 0:
            body_c[0] = f"        t{r} = t{r} + {r + 2};"
        loops_i.append(f"    while (a{r} < 5)\n    {{\n" + "\n".join(body_i) + "\n    }")
        loops_c.append(f"    while (a{r} < 5)\n    {{\n" + "\n".join(body_c) + "\n    }")
    total = "    int s = 0;\n" + "\n".join(f"    s = s + t{r};" for r in range(n_regions))

    def assemble(loops):
        return (
            "int main()\n{\n"
            + "\n".join(decls)
            + "\n"
            + "\n".join(loops)
            + "\n"
            + total
            + "\n    return s;\n}\n"
        )

    return assemble(loops_i), assemble(loops_c)


def twelve_user_histories() -> dict[str, list[tuple[int, str, str]]]:
    """Twelve users; bugs drawn from the two worked-example archetypes."""
    histories: dict[str, list[tuple[int, str, str]]] = {}
    for i in range(1, 7):  # fig2-style bug, later fixed
        mapping = {"x": f"v{i}", "c": f"k{i}"}
        histories[f"u{i:02d}"] = [
            (1, "WA", rename_vars(FIG2A, mapping)),
            (2, "AC", rename_vars(FIG2B, mapping)),
        ]
    for i in (7, 8):  # fig3-style bug, later fixed
        mapping = {"x": f"w{i}", "u": f"m{i}"}
        histories[f"u{i:02d}"] = [
            (1, "WA", rename_vars(FIG3A, mapping)),
            (2, "AC", rename_vars(FIG3B, mapping)),
        ]
    for i in (9, 10):  # fig2-style bug, never fixed (group one)
        mapping = {"x": f"p{i}", "c": f"q{i}"}
        histories[f"u{i:02d}"] = [(1, "WA", rename_vars(FIG2A, mapping))]
    histories["u11"] = [  # two incorrect attempts, then fixed
        (1, "WA", rename_vars(FIG3A, {"x": "a11", "u": "b11"})),
        (2, "WA", rename_vars(FIG2A, {"x": "a11", "c": "b11"})),
        (3, "AC", rename_vars(FIG2B, {"x": "a11", "c": "b11"})),
    ]
    histories["u12"] = [(1, "WA", UNFIXABLE)]  # group one, not repairable
    return histories
