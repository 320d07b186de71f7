import { beforeEach, describe, expect, it, vi } from 'vitest';
import { ApiClient, ApiError } from '../src/client.js';
import {
    ExtractionReviewConsole,
    GradeReviewConsole,
    Queue,
    ValidationError,
} from '../src/review.js';
import type { GradeQueuePayload, ReviewQueuePayload } from '../src/types.js';

import reviewQueueFixture from '../fixtures/review_queue.json';
import gradesFixture from '../fixtures/grades.json';

const reviewQueue = reviewQueueFixture as unknown as ReviewQueuePayload;
const grades = gradesFixture as unknown as GradeQueuePayload;

describe('queue traversal', () => {
    it('moves with j/k and arrow keys, clamped at the ends', () => {
        const q = new Queue([1, 2, 3]);
        expect(q.current()).toBe(1);
        expect(q.handleKey('j')).toBe(2);
        expect(q.handleKey('ArrowDown')).toBe(3);
        expect(q.handleKey('n')).toBe(3);
        expect(q.handleKey('k')).toBe(2);
        expect(q.handleKey('ArrowUp')).toBe(1);
        expect(q.handleKey('p')).toBe(1);
    });

    it('removeCurrent advances to the next item', () => {
        const q = new Queue(['a', 'b', 'c']);
        expect(q.removeCurrent()).toBe('b');
        q.next();
        expect(q.removeCurrent()).toBe('b');
        expect(q.removeCurrent()).toBeNull();
        expect(q.length).toBe(0);
    });
});

function fakeApi(overrides: Partial<Record<keyof ApiClient, unknown>> = {}): ApiClient {
    const api = {
        reviewQueue: vi.fn(async () => structuredClone(reviewQueue)),
        gradeQueue: vi.fn(async () => structuredClone(grades)),
        postReview: vi.fn(async (id: string, p: { decision: string }) => ({
            candidate_id: id,
            state: p.decision === 'accept' ? 'accepted'
                : p.decision === 'reject' ? 'rejected' : 'awaiting-review',
        })),
        postGradeReview: vi.fn(async (id: string, p: { score?: number }) => ({
            grade_id: 'new-' + id, score: p.score ?? 1, supersedes: id, final: true,
        })),
        ...overrides,
    };
    return api as unknown as ApiClient;
}

describe('extraction review console', () => {
    let api: ApiClient;
    let console_: ExtractionReviewConsole;

    beforeEach(async () => {
        api = fakeApi();
        console_ = new ExtractionReviewConsole(api, 'reviewer-1');
        await console_.load();
    });

    it('accept posts the decision and removes the item from the queue', async () => {
        const before = console_.queue.length;
        const id = console_.queue.current()!.candidate_id;
        await console_.decide('accept');
        expect(api.postReview).toHaveBeenCalledWith(id, expect.objectContaining({
            reviewer_id: 'reviewer-1', decision: 'accept',
        }));
        expect(console_.queue.length).toBe(before - 1);
        expect(console_.state.kind).toBe('done');
    });

    it('revise sends the edited text and keeps the item in the queue', async () => {
        await console_.decide('revise', { revisedText: 'Sharper question?' });
        expect(api.postReview).toHaveBeenCalledWith(expect.any(String),
            expect.objectContaining({ decision: 'revise', revised_text: 'Sharper question?' }));
        expect(console_.queue.current()!.question).toBe('Sharper question?');
    });

    it('blocks reject without a reason client-side', async () => {
        await expect(console_.decide('reject')).rejects.toThrow(ValidationError);
        expect(api.postReview).not.toHaveBeenCalled();
    });

    it('surfaces a server conflict as a refresh prompt, not a crash', async () => {
        api = fakeApi({
            postReview: vi.fn(async () => {
                throw new ApiError(409, 'candidate is not awaiting review');
            }),
        });
        console_ = new ExtractionReviewConsole(api, 'reviewer-1');
        await console_.load();
        await console_.decide('accept');
        expect(console_.state).toEqual({
            kind: 'conflict', detail: 'candidate is not awaiting review',
        });
        expect(console_.queue.length).toBe(reviewQueue.candidates.length);
    });
});

describe('grade review console', () => {
    it('confirm posts and dequeues', async () => {
        const api = fakeApi({
            gradeQueue: vi.fn(async () => ({
                grades: grades.grades.slice(0, 2).map(g => ({ ...g, final: false })),
            })),
        });
        const console_ = new GradeReviewConsole(api);
        await console_.load();
        const id = console_.queue.current()!.grade_id;
        await console_.confirm();
        expect(api.postGradeReview).toHaveBeenCalledWith(id, { decision: 'confirm' });
        expect(console_.queue.length).toBe(1);
    });

    it('override requires a note and a score within bounds', async () => {
        const api = fakeApi({
            gradeQueue: vi.fn(async () => ({
                grades: grades.grades.slice(0, 1).map(g => ({ ...g, final: false })),
            })),
        });
        const console_ = new GradeReviewConsole(api);
        await console_.load();
        await expect(console_.override(1, '')).rejects.toThrow(ValidationError);
        const max = console_.queue.current()!.max_score;
        await expect(console_.override(max + 1, 'note')).rejects.toThrow(ValidationError);
        await console_.override(0, 'regraded by hand');
        expect(api.postGradeReview).toHaveBeenCalledWith(expect.any(String), {
            decision: 'override', score: 0, note: 'regraded by hand',
        });
    });

    it('toggling client state never changes a displayed score', async () => {
        const api = fakeApi();
        const console_ = new GradeReviewConsole(api);
        await console_.load();
        const { gradeCard } = await import('../src/views.js');
        const item = console_.queue.current();
        if (item === null) return;
        const before = gradeCard(item);
        console_.queue.next();
        console_.queue.prev();
        expect(gradeCard(console_.queue.current()!)).toBe(before);
    });
});
