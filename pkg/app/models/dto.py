"""Pydantic schemas for every report the CLI prints."""

from typing import Any, Dict, List

from pydantic import BaseModel, Field


class ConventionRecord(BaseModel):
    twist_sign: int = Field(..., description="Dehn twist 부호 (T_c = I + sign * c c^T J)")
    word_order: str = Field(..., description="단어 곱셈 순서")
    calibrated_against: List[str] = Field(
        default_factory=list,
        description="보정에 사용한 fibration 이름 목록 (비어 있으면 강제 지정)",
    )


class CheckResult(BaseModel):
    name: str = Field(..., description="검사 이름")
    passed: bool = Field(..., description="통과 여부")
    detail: str = Field("", description="실패 또는 참고 메시지")


class TauResult(BaseModel):
    h: int = Field(..., description="fiber genus")
    tau: int = Field(..., description="Meyer cocycle 값 tau_h(A, B)")
    kernel_dim: int = Field(..., description="V_{A,B} 차원")


class WordResult(BaseModel):
    word: str = Field(..., description="정규화된 단어")
    atlas: str = Field(..., description="사용한 atlas")
    h: int = Field(..., description="fiber genus")
    matrix: str = Field(..., description="행렬 (행은 ';', 원소는 ',' 로 구분)")
    symplectic: bool = Field(..., description="M^T J M = J 여부")


class SingularFiberModel(BaseModel):
    label: str = Field(..., description="곡선 이름")
    homology: List[int] = Field(..., description="호몰로지 좌표")
    sep_type: int = Field(..., description="분리 타입 (0 = nonseparating)")
    chirality: str = Field(..., description="right 또는 left")


class SectionModel(BaseModel):
    exists: bool = Field(..., description="section 존재 여부 (선언값)")
    self_intersection: int | None = Field(None, description="section 자기교차수")
    lifts: str = Field("", description="boundary lift 라벨")
    note: str = Field("", description="출처 메모")


class ProvenanceModel(BaseModel):
    operation: str = Field(..., description="단계 종류 (construction, subtract, ...)")
    inputs: List[str] = Field(..., description="입력 이름")
    note: str = Field("", description="부가 설명")


class SignatureResult(BaseModel):
    name: str = Field(..., description="fibration 이름")
    h: int = Field(..., description="fiber genus")
    base_genus: int = Field(..., description="base genus")
    signature: int = Field(..., description="총 signature")
    complement_signature: int | None = Field(
        None, description="특이 섬유 근방을 뺀 여집합의 signature"
    )
    euler: int = Field(..., description="Euler characteristic")
    mu_comb: List[int] = Field(..., description="타입별 특이 섬유 개수")
    fibers: List[SingularFiberModel] = Field(default_factory=list, description="남은 특이 섬유")
    section: SectionModel | None = Field(None, description="선언된 section")
    provenance: List[ProvenanceModel] = Field(default_factory=list, description="생성 이력")


class BundleCertificateModel(BaseModel):
    id: str = Field(..., description="인증서 식별자")
    h: int = Field(..., description="fiber genus")
    g: int = Field(..., description="base genus")
    sigma: int = Field(..., description="signature (4의 배수)")
    chain: List[ProvenanceModel] = Field(default_factory=list, description="생성 이력")
    assumptions: List[str] = Field(default_factory=list, description="구성에 필요한 가정")


class BoundRow(BaseModel):
    h: int = Field(..., description="fiber genus")
    lower: str = Field(..., description="하한 2/(h-1)")
    upper: str = Field(..., description="구성적 상한")
    source: str = Field(..., description="상한 규칙")
    residue: str = Field(..., description="24/(h-l) 상한")
    historical: str = Field(..., description="기존 상한 110")
    kodaira: str = Field(..., description="Kodaira 비교값 (비구성적)")
    kodaira_constructive: bool = Field(False, description="Kodaira 값의 구성 여부")
    g_at_one: int = Field(..., description="g_h(1) 상한")
    witnesses: List[str] = Field(default_factory=list, description="근거 인증서")


class ClaimRow(BaseModel):
    claim: str = Field(..., description="검증 항목")
    expected: str = Field(..., description="기대값")
    computed: str = Field(..., description="계산값")
    match: bool = Field(..., description="일치 여부")


class CalibrationAttemptModel(BaseModel):
    twist_sign: int = Field(..., description="시도한 부호")
    passed: bool = Field(..., description="보정 통과 여부")
    detail: str = Field("", description="실패 사유")


class Report(BaseModel):
    command: str = Field(..., description="실행한 하위 명령")
    arguments: Dict[str, Any] = Field(default_factory=dict, description="입력 인자")
    convention: ConventionRecord | None = Field(None, description="사용한 규약")
    results: Dict[str, Any] = Field(default_factory=dict, description="명령별 결과")
    checks: List[CheckResult] = Field(default_factory=list, description="검사 목록")
    ok: bool = Field(True, description="성공 여부")
    exit_status: int = Field(0, description="종료 코드")
    error: str | None = Field(None, description="오류 메시지")


__all__ = [
    "BoundRow",
    "BundleCertificateModel",
    "CalibrationAttemptModel",
    "CheckResult",
    "ClaimRow",
    "ConventionRecord",
    "ProvenanceModel",
    "Report",
    "SectionModel",
    "SignatureResult",
    "SingularFiberModel",
    "TauResult",
    "WordResult",
]
