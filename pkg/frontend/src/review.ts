// Queue-oriented review consoles. Reviewers walk dozens of items per
// session, so traversal is keyboard-driven and each decision removes the
// item from the local queue once the server confirms it.

import { ApiClient, ApiError } from './client.js';
import type { GradeRecord, GradeReviewResult, ReviewCandidate, ReviewResult } from './types.js';

export class Queue<T> {
    private index = 0;

    constructor(private items: T[]) {}

    get length(): number {
        return this.items.length;
    }

    current(): T | null {
        return this.items[this.index] ?? null;
    }

    next(): T | null {
        if (this.index < this.items.length - 1) this.index++;
        return this.current();
    }

    prev(): T | null {
        if (this.index > 0) this.index--;
        return this.current();
    }

    /** Drop the current item (after a confirmed server write). */
    removeCurrent(): T | null {
        this.items.splice(this.index, 1);
        if (this.index >= this.items.length) {
            this.index = Math.max(0, this.items.length - 1);
        }
        return this.current();
    }

    handleKey(key: string): T | null {
        if (key === 'j' || key === 'n' || key === 'ArrowDown') return this.next();
        if (key === 'k' || key === 'p' || key === 'ArrowUp') return this.prev();
        return this.current();
    }
}

export type WriteState =
    | { kind: 'idle' }
    | { kind: 'in-flight' }
    | { kind: 'done'; result: ReviewResult | GradeReviewResult }
    | { kind: 'conflict'; detail: string }
    | { kind: 'error'; status: number; detail: string };

export class ValidationError extends Error {}

export class ExtractionReviewConsole {
    queue = new Queue<ReviewCandidate>([]);
    state: WriteState = { kind: 'idle' };

    constructor(private api: ApiClient, private reviewerId: string) {}

    async load(): Promise<void> {
        const payload = await this.api.reviewQueue();
        this.queue = new Queue(payload.candidates);
    }

    async decide(decision: 'accept' | 'revise' | 'reject',
                 opts: { revisedText?: string; reason?: string } = {}): Promise<void> {
        const item = this.queue.current();
        if (!item) throw new ValidationError('queue is empty');
        if (this.state.kind === 'in-flight') {
            throw new ValidationError('a write is already in flight');
        }
        if (decision === 'reject' && !opts.reason) {
            throw new ValidationError('rejection requires a reason');
        }
        if (decision === 'revise' && !opts.revisedText) {
            throw new ValidationError('revision requires the revised text');
        }
        this.state = { kind: 'in-flight' };
        try {
            const result = await this.api.postReview(item.candidate_id, {
                reviewer_id: this.reviewerId,
                decision,
                revised_text: opts.revisedText,
                reason: opts.reason,
            });
            this.state = { kind: 'done', result };
            if (decision === 'revise') {
                item.question = opts.revisedText!;
                item.state = result.state;
            } else {
                this.queue.removeCurrent();
            }
        } catch (e) {
            if (e instanceof ApiError && e.status === 409) {
                // the candidate changed server-side; caller should reload
                this.state = { kind: 'conflict', detail: e.detail };
            } else if (e instanceof ApiError) {
                this.state = { kind: 'error', status: e.status, detail: e.detail };
            } else {
                throw e;
            }
        }
    }
}

export class GradeReviewConsole {
    queue = new Queue<GradeRecord>([]);
    state: WriteState = { kind: 'idle' };

    constructor(private api: ApiClient) {}

    async load(flaggedOnly = false): Promise<void> {
        const payload = await this.api.gradeQueue(flaggedOnly);
        this.queue = new Queue(payload.grades.filter(g => !g.final || g.flags.length > 0));
    }

    async confirm(): Promise<void> {
        await this.submit({ decision: 'confirm' });
    }

    async override(score: number, note: string): Promise<void> {
        if (!note) throw new ValidationError('override requires an audit note');
        const item = this.queue.current();
        if (item && (score < 0 || score > item.max_score)) {
            throw new ValidationError(`score must be in [0, ${item.max_score}]`);
        }
        await this.submit({ decision: 'override', score, note });
    }

    private async submit(payload: {
        decision: 'confirm' | 'override'; score?: number; note?: string;
    }): Promise<void> {
        const item = this.queue.current();
        if (!item) throw new ValidationError('queue is empty');
        if (this.state.kind === 'in-flight') {
            throw new ValidationError('a write is already in flight');
        }
        this.state = { kind: 'in-flight' };
        try {
            const result = await this.api.postGradeReview(item.grade_id, payload);
            this.state = { kind: 'done', result };
            this.queue.removeCurrent();
        } catch (e) {
            if (e instanceof ApiError && e.status === 409) {
                this.state = { kind: 'conflict', detail: e.detail };
            } else if (e instanceof ApiError) {
                this.state = { kind: 'error', status: e.status, detail: e.detail };
            } else {
                throw e;
            }
        }
    }
}
