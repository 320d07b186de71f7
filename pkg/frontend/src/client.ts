import type {
    BenchmarkPayload,
    ComparePayload,
    GradeQueuePayload,
    GradeReviewResult,
    LeaderboardPayload,
    ModelPagePayload,
    ProblemRunsPayload,
    ReviewQueuePayload,
    ReviewResult,
} from './types.js';

export class ApiError extends Error {
    constructor(public status: number, public detail: string) {
        super(`${status}: ${detail}`);
    }
}

async function asJson<T>(res: Response): Promise<T> {
    if (!res.ok) {
        let detail = res.statusText;
        try {
            const body = await res.json();
            if (body && typeof body.detail === 'string') detail = body.detail;
        } catch {
            // non-JSON error body, keep the status text
        }
        throw new ApiError(res.status, detail);
    }
    return res.json() as Promise<T>;
}

/** Thin wrapper over the HTTP API. Writes carry the X-Write-Token header. */
export class ApiClient {
    constructor(private baseUrl: string, private writeToken?: string) {}

    private get(path: string): Promise<Response> {
        return fetch(this.baseUrl + path);
    }

    private post(path: string, body: unknown): Promise<Response> {
        const headers: Record<string, string> = {
            'Content-Type': 'application/json',
        };
        if (this.writeToken) headers['X-Write-Token'] = this.writeToken;
        return fetch(this.baseUrl + path, {
            method: 'POST',
            headers,
            body: JSON.stringify(body),
        });
    }

    async leaderboard(): Promise<LeaderboardPayload> {
        return asJson(await this.get('/api/leaderboard'));
    }

    async benchmark(benchId: string): Promise<BenchmarkPayload> {
        return asJson(await this.get(`/api/benchmarks/${encodeURIComponent(benchId)}`));
    }

    async problemRuns(benchId: string, problemId: string): Promise<ProblemRunsPayload> {
        return asJson(await this.get(
            `/api/benchmarks/${encodeURIComponent(benchId)}/problems/${encodeURIComponent(problemId)}/runs`));
    }

    async modelPage(modelId: string): Promise<ModelPagePayload> {
        return asJson(await this.get(`/api/models/${encodeURIComponent(modelId)}`));
    }

    async compare(a: string, b: string): Promise<ComparePayload> {
        return asJson(await this.get(
            `/api/compare?a=${encodeURIComponent(a)}&b=${encodeURIComponent(b)}`));
    }

    async reviewQueue(): Promise<ReviewQueuePayload> {
        return asJson(await this.get('/api/review'));
    }

    async gradeQueue(flaggedOnly = false): Promise<GradeQueuePayload> {
        return asJson(await this.get(flaggedOnly ? '/api/grades?flagged=true' : '/api/grades'));
    }

    async postReview(candidateId: string, payload: {
        reviewer_id: string;
        decision: 'accept' | 'revise' | 'reject';
        revised_text?: string;
        reason?: string;
    }): Promise<ReviewResult> {
        return asJson(await this.post(
            `/api/review/${encodeURIComponent(candidateId)}`, payload));
    }

    async postGradeReview(gradeId: string, payload: {
        decision: 'confirm' | 'override';
        score?: number;
        note?: string;
    }): Promise<GradeReviewResult> {
        return asJson(await this.post(
            `/api/grades/${encodeURIComponent(gradeId)}/review`, payload));
    }
}
