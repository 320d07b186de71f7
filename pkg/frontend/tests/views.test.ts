import { describe, expect, it } from 'vitest';
import {
    benchmarkView,
    candidateCard,
    comparisonView,
    errorView,
    gradeCard,
    leaderboardView,
    modelView,
    traceView,
} from '../src/views.js';
import type {
    BenchmarkPayload,
    ComparePayload,
    GradeQueuePayload,
    LeaderboardPayload,
    ModelPagePayload,
    ProblemRunsPayload,
    ReviewQueuePayload,
    RunRecord,
} from '../src/types.js';

import leaderboardFixture from '../fixtures/leaderboard.json';
import benchmarkFixture from '../fixtures/benchmark.json';
import problemRunsFixture from '../fixtures/problem_runs.json';
import modelFixture from '../fixtures/model.json';
import compareFixture from '../fixtures/compare.json';
import reviewQueueFixture from '../fixtures/review_queue.json';
import gradesFixture from '../fixtures/grades.json';
import traceFixture from '../fixtures/trace_toolcap.json';
import errorFixture from '../fixtures/error_404.json';

const leaderboard = leaderboardFixture as unknown as LeaderboardPayload;
const benchmark = benchmarkFixture as unknown as BenchmarkPayload;
const problemRuns = problemRunsFixture as unknown as ProblemRunsPayload;
const model = modelFixture as unknown as ModelPagePayload;
const compare = compareFixture as unknown as ComparePayload;
const reviewQueue = reviewQueueFixture as unknown as ReviewQueuePayload;
const grades = gradesFixture as unknown as GradeQueuePayload;
const trace = traceFixture as unknown as RunRecord;

describe('leaderboard view', () => {
    it('renders every row with a CI bar, in the payload order', () => {
        const html = leaderboardView(leaderboard);
        for (const rows of Object.values(leaderboard.per_benchmark)) {
            for (const row of rows) {
                expect(html).toContain(`data-model="${row.model_id}"`);
                expect(html).toContain(row.mean_score.toFixed(3));
            }
            const positions = rows.map(r => html.indexOf(`data-model="${r.model_id}"`));
            expect(positions).toEqual([...positions].sort((a, b) => a - b));
        }
        expect(html.match(/ci-bar/g)!.length).toBeGreaterThan(0);
        expect(html).toContain(`data-watermark="${leaderboard.watermark}"`);
    });

    it('displays only payload numbers, never recomputed ones', () => {
        // same payload rendered twice is byte-identical: no client state,
        // no clocks, no locale-dependent formatting
        expect(leaderboardView(leaderboard)).toBe(leaderboardView(leaderboard));
        // scores in the HTML are exactly the payload values
        const row = Object.values(leaderboard.per_benchmark)[0][0];
        expect(leaderboardView(leaderboard)).toContain(row.mean_score.toFixed(3));
    });
});

describe('benchmark view', () => {
    it('renders spec metadata and the row table', () => {
        const html = benchmarkView(benchmark);
        expect(html).toContain(benchmark.spec.name);
        expect(html).toContain(benchmark.spec.family_tag);
        expect(html).toContain(String(benchmark.spec.size));
        for (const row of benchmark.rows) {
            expect(html).toContain(`data-model="${row.model_id}"`);
        }
    });
});

describe('trace view', () => {
    it('renders an ordinary run transcript fully', () => {
        const run = problemRuns.runs[0];
        const html = traceView(run);
        expect(html).toContain(run.model_id);
        for (const msg of run.transcript) {
            expect(html).toContain(`data-index="${run.transcript.indexOf(msg)}"`);
        }
        expect(html).not.toContain('cap-indicator');
    });

    it('virtualizes a 200-call transcript and shows the cap indicator', () => {
        const html = traceView(trace);
        expect(trace.transcript.length).toBeGreaterThan(100);
        expect(html).toContain('cap-indicator');
        expect(html).toContain('200 calls');
        expect(html).toContain('messages elided');
        const rendered = html.match(/class="msg /g)!.length;
        expect(rendered).toBeLessThan(trace.transcript.length);
    });
});

describe('comparison view', () => {
    it('renders per-benchmark deltas from the payload', () => {
        const html = comparisonView(compare);
        for (const [benchId, d] of Object.entries(compare.benchmarks)) {
            expect(html).toContain(`data-bench="${benchId}"`);
            const sign = d.score_delta > 0 ? '+' : '';
            expect(html).toContain(`${sign}${d.score_delta.toFixed(3)}`);
        }
    });
});

describe('model view', () => {
    it('renders expected performance and per-benchmark rows', () => {
        const html = modelView(model);
        expect(html).toContain(model.model_id);
        if (model.expected_performance === null) {
            expect(html).toContain('&mdash;');
        } else {
            expect(html).toContain(model.expected_performance.toFixed(4));
        }
        expect(html).toContain(modelFixture.expected_performance === null
            ? '&mdash;' : String(modelFixture.expected_performance));
        for (const benchId of Object.keys(model.benchmarks)) {
            expect(html).toContain(benchId);
        }
    });
});

describe('review cards', () => {
    it('candidate card shows question, paper link, and full stage history', () => {
        const c = reviewQueue.candidates[0];
        const html = candidateCard(c);
        expect(html).toContain(c.question);
        expect(html).toContain('arxiv.org/abs/');
        for (const h of c.stage_history) {
            expect(html).toContain(`data-stage="${h.stage}"`);
        }
    });

    it('grade card shows the machine score verbatim and no arithmetic', () => {
        const g = grades.grades[0];
        const html = gradeCard(g);
        expect(html).toContain(`${g.score} / ${g.max_score}`);
        expect(html).toContain(g.method);
    });

    it('escapes HTML in user-controlled text', () => {
        const c = { ...reviewQueue.candidates[0], question: '<script>x</script>' };
        expect(candidateCard(c)).not.toContain('<script>');
    });
});

describe('error states', () => {
    it('renders an inline error, never a blank page', () => {
        const html = errorView(404, (errorFixture as { detail: string }).detail);
        expect(html.length).toBeGreaterThan(0);
        expect(html).toContain('data-status="404"');
        expect(html).toContain('no-such-benchmark');
    });
});
