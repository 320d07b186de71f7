// Contract tests against a live API instance seeded by the mock desk run.
// Skipped unless RUN_CONTRACT=1 (they spawn a Python server on a local port).

import { spawn, type ChildProcess } from 'node:child_process';
import path from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';
import { ApiClient, ApiError } from '../src/client.js';
import { ExtractionReviewConsole, GradeReviewConsole } from '../src/review.js';
import { leaderboardView, traceView } from '../src/views.js';

const PORT = 8779;
const BASE = `http://127.0.0.1:${PORT}`;
const TOKEN = 'contract-token';
const enabled = process.env.RUN_CONTRACT === '1';

let server: ChildProcess;

async function waitForServer(): Promise<void> {
    for (let i = 0; i < 100; i++) {
        try {
            const res = await fetch(`${BASE}/api/leaderboard`);
            if (res.ok) return;
        } catch {
            // not up yet
        }
        await new Promise(r => setTimeout(r, 200));
    }
    throw new Error('contract server did not come up');
}

describe.skipIf(!enabled)('live API contract', () => {
    beforeAll(async () => {
        const script = path.resolve(__dirname, '../scripts/contract_server.py');
        server = spawn('python3', [script, String(PORT)], { stdio: 'ignore' });
        await waitForServer();
    }, 60000);

    afterAll(() => {
        server?.kill();
    });

    it('read views render from the live API exactly as from fixtures', async () => {
        const api = new ApiClient(BASE);
        const lb = await api.leaderboard();
        expect(Object.keys(lb.per_benchmark)).toContain('toy-2026');
        expect(leaderboardView(lb)).toContain('data-model="mock-a"');

        const runs = await api.problemRuns('toy-2026', 'p00');
        expect(runs.runs.length).toBeGreaterThan(0);
        expect(traceView(runs.runs[0])).toContain('mock-a');

        const cmp = await api.compare('mock-a', 'mock-b');
        const delta = cmp.benchmarks['toy-2026'];
        expect(delta.score_delta).toBeCloseTo(
            delta.a.mean_score - delta.b.mean_score, 12);
    });

    it('unknown benchmark surfaces as an ApiError with the server detail', async () => {
        const api = new ApiClient(BASE);
        await expect(api.benchmark('ghost')).rejects.toThrowError(ApiError);
    });

    it('writes without the token are rejected', async () => {
        const api = new ApiClient(BASE);
        await expect(api.postReview('cand-0', {
            reviewer_id: 'r', decision: 'accept',
        })).rejects.toMatchObject({ status: 401 });
    });

    it('extraction review round-trips: revise, accept, reject change server state', async () => {
        const api = new ApiClient(BASE, TOKEN);
        const console_ = new ExtractionReviewConsole(api, 'contract-reviewer');
        await console_.load();
        const initial = console_.queue.length;
        expect(initial).toBeGreaterThanOrEqual(3);

        await console_.decide('revise', { revisedText: 'Question 0, clarified?' });
        expect(console_.state.kind).toBe('done');
        await console_.decide('accept');
        await console_.decide('reject', { reason: 'not self-contained' });

        await console_.load();
        expect(console_.queue.length).toBe(initial - 2);
    });

    it('double-deciding a candidate yields a conflict state, then reload recovers', async () => {
        const api = new ApiClient(BASE, TOKEN);
        const console_ = new ExtractionReviewConsole(api, 'contract-reviewer');
        await console_.load();
        const id = console_.queue.current()!.candidate_id;
        await console_.decide('accept');
        // decide the same candidate again behind the console's back
        await expect(api.postReview(id, {
            reviewer_id: 'contract-reviewer', decision: 'accept',
        })).rejects.toMatchObject({ status: 409 });
    });

    it('grade review round-trips: override supersedes, confirm finalizes', async () => {
        const api = new ApiClient(BASE, TOKEN);
        const console_ = new GradeReviewConsole(api);
        const queue = await api.gradeQueue();
        const target = queue.grades[0];

        const overridden = await api.postGradeReview(target.grade_id, {
            decision: 'override', score: 0, note: 'contract-test override',
        });
        expect(overridden.supersedes).toBe(target.grade_id);

        // the superseded grade is gone from the queue; the new one is present
        const after = await api.gradeQueue();
        const ids = after.grades.map(g => g.grade_id);
        expect(ids).not.toContain(target.grade_id);
        expect(ids).toContain(overridden.grade_id);

        const confirmed = await api.postGradeReview(overridden.grade_id, {
            decision: 'confirm',
        });
        expect(confirmed.final).toBe(true);

        // re-reviewing the superseded grade conflicts
        await expect(api.postGradeReview(target.grade_id, {
            decision: 'confirm',
        })).rejects.toMatchObject({ status: 409 });
        void console_;
    });
});
